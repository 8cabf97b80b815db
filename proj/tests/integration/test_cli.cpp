#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBin = DIVGRAD_LAB_BIN;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("divgrad_it_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = kBin + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// data rows only (skips '#' provenance/metadata lines)
std::vector<std::string> rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("lyapunov run writes csv and manifest") {
  const auto dir = scratch("lyap");
  REQUIRE(run("lyapunov --dist uniform:1:2 --E 0.001,0.01 --n 20000 --replicates 4 --out " +
              dir.string()) == 0);
  const auto r = rows(dir / "lyapunov.csv");
  REQUIRE(r.size() == 3);
  CHECK(r[0].rfind("E,", 0) == 0);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  bool found = false;
  for (const auto& f : m["files"]) {
    if (f["path"] == "lyapunov.csv") {
      found = true;
      std::ostringstream cmd;
      // hash in the manifest matches the bytes on disk
      std::ifstream in(dir / "lyapunov.csv", std::ios::binary);
      CHECK(f["bytes"].get<std::size_t>() == fs::file_size(dir / "lyapunov.csv"));
      CHECK(f["sha256"].get<std::string>().size() == 64);
    }
  }
  CHECK(found);
  CHECK(m["config_hash"].get<std::string>().size() == 64);
}

TEST_CASE("outputs do not depend on the worker count") {
  const auto a = scratch("thr1"), b = scratch("thr8");
  const std::string args = "ids --N 400 --E geom:1e-3:5e-2:4 --replicates 6 --seed 9 ";
  REQUIRE(run(args + "--threads 1 --out " + a.string()) == 0);
  REQUIRE(run(args + "--threads 8 --out " + b.string()) == 0);
  CHECK(slurp(a / "ids.csv") == slurp(b / "ids.csv"));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
}

TEST_CASE("config file with flag override") {
  const auto dir = scratch("cfg");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# ids run\nN = 300\nE = 0.01,0.02\nreplicates = 3\nseed = 5\n";
  }
  const auto o1 = dir / "o1", o2 = dir / "o2";
  REQUIRE(run("ids --config " + (dir / "run.cfg").string() + " --out " + o1.string()) == 0);
  REQUIRE(run("ids --config " + (dir / "run.cfg").string() + " --replicates 4 --out " + o2.string()) ==
          0);
  const auto r1 = rows(o1 / "ids.csv"), r2 = rows(o2 / "ids.csv");
  REQUIRE(r1.size() == 3);
  CHECK(r1[1].find(",3,") != std::string::npos);
  CHECK(r2[1].find(",4,") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(run("no-such-command") == 5);
  CHECK(run("ids --no-such-flag 1") == 2);
  CHECK(run("ids --N -5 --out " + dir.string()) == 2);
  CHECK(run("ids --dist bogus:1 --out " + dir.string()) == 2);
  CHECK(run("lyapunov --config /nonexistent/run.cfg") == 4);
  {
    std::ofstream f(dir / "blocker");
    f << "x";
  }
  CHECK(run("ids --N 100 --replicates 1 --E 0.01 --out " + (dir / "blocker" / "sub").string()) == 4);
  CHECK(run("--version") == 0);
}

TEST_CASE("figure 4 data") {
  const auto dir = scratch("fig4");
  REQUIRE(run("figure --id 4 --out " + dir.string()) == 0);
  for (const char* side : {"left", "right"}) {
    INFO(side);
    const auto r = rows(dir / side / "ids.csv");
    CHECK(r.size() == 101);
  }
}

TEST_CASE("verify report matches the schema") {
  const auto dir = scratch("verify");
  REQUIRE(run("verify --only A1,A9 --out " + dir.string()) == 0);
  const auto report = dir / "verify_report.json";
  REQUIRE(fs::exists(report));
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["pass"] == true);
  CHECK(j["criteria"].size() == 3);  // A1, A9, A14
  const std::string py = std::string("python3 -c \"import json,jsonschema;jsonschema.validate(") +
                         "json.load(open('" + report.string() + "')),json.load(open('" +
                         DIVGRAD_SCHEMA + "')))\"";
  const int raw = std::system(py.c_str());
  CHECK(WIFEXITED(raw));
  CHECK(WEXITSTATUS(raw) == 0);
}
