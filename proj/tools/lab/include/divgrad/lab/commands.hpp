#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "divgrad/lab/config.hpp"
#include "divgrad/lab/output.hpp"

namespace divgrad::lab {

struct KeySpec {
  std::string key;
  std::string fallback;  // default value, in config syntax
  std::string help;
};

struct RunContext {
  const Config& cfg;
  OutputSink& out;
  std::ostream& log;
  int status = 0;  // set nonzero by verify on failure
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;
  std::function<void(RunContext&)> run;
};

/// Every subcommand with its accepted keys.
const std::vector<CommandSpec>& commands();
const CommandSpec* find_command(const std::string& name);

/// Keys accepted by every command (not part of the result hash).
inline const std::vector<KeySpec>& common_keys() {
  static const std::vector<KeySpec> k = {
      {"out", ".", "output directory"},
      {"threads", "", "worker count (default: DIVGRAD_THREADS or hardware)"},
  };
  return k;
}

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kNumerical = 3,
  kIo = 4,
  kUnknownCommand = 5,
  kAcceptanceFailed = 6,
};

/// Validates keys, runs the command, writes the manifest. Library errors
/// propagate; the caller maps them to exit codes.
int run_command(const CommandSpec& cmd, const Config& cfg, std::ostream& log);

/// Maps the current exception to an exit code and prints the message.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace divgrad::lab
