#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "divgrad/lab/commands.hpp"
#include "divgrad/lab/config.hpp"
#include "divgrad/lab/output.hpp"

using namespace divgrad::lab;

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the random div-grad Jacobi operator", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + tool_version());
  app.require_subcommand(0, 1);

  std::string config_path;
  // key → value for every flag given; one map per subcommand
  std::map<std::string, std::map<std::string, std::string>> given;
  std::map<std::string, CLI::App*> subs;

  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    sub->add_option("--config", config_path, "key = value configuration file");
    auto add = [&](const KeySpec& k) {
      auto* opt = sub->add_option_function<std::string>(
          "--" + k.key, [&given, name = cmd.name, key = k.key](const std::string& v) {
            given[name][key] = v;
          },
          k.help);
      if (!k.fallback.empty()) opt->description(k.help + " [default: " + k.fallback + "]");
    };
    for (const auto& k : cmd.keys) add(k);
    for (const auto& k : common_keys()) add(k);
  }

  // unknown subcommands are their own exit code
  if (argc > 1 && argv[1][0] != '-' && find_command(argv[1]) == nullptr) {
    std::cerr << "unknown command '" << argv[1] << "'\n" << app.help();
    return kUnknownCommand;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  const CommandSpec* cmd = nullptr;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cmd = find_command(name);
  }
  if (cmd == nullptr) {
    std::cerr << app.help();
    return kUnknownCommand;
  }

  try {
    Config cfg = config_path.empty() ? Config{} : Config::from_file(config_path);
    for (const auto& [k, v] : given[cmd->name]) cfg.set(k, v);
    return run_command(*cmd, cfg, std::cout);
  } catch (...) {
    return exit_code_for_current_exception(std::cerr);
  }
}
