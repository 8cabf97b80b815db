#include <sstream>
#include <stdexcept>

#include "divgrad/errors.hpp"
#include "divgrad/lab/commands.hpp"
#include "divgrad/lab/config.hpp"
#include "divgrad/lab/output.hpp"
#include "doctest.h"

using namespace divgrad;
using namespace divgrad::lab;

TEST_CASE("grid expressions") {
  CHECK(parse_grid("0.1,0.2, 0.5") == std::vector<double>{0.1, 0.2, 0.5});
  const auto g = parse_grid("geom:1e-3:1e-1:3");
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(1e-2));
  CHECK(parse_grid("lin:0:1:5") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_grid("step:100:50:300") == std::vector<double>{100, 150, 200, 250, 300});
  CHECK_THROWS_AS(parse_grid("geom:1:0:3"), ParameterError);
  CHECK_THROWS_AS(parse_grid("foo:1:2:3"), ParameterError);
  CHECK_THROWS_AS(parse_grid("1,x"), ParameterError);
  CHECK_THROWS_AS(parse_double("1e400", "x"), ParameterError);
  CHECK(parse_int("1e6", "n") == 1000000);
  CHECK_THROWS_AS(parse_int("1.5", "n"), ParameterError);
}

TEST_CASE("config files and canonical hash") {
  const auto c = Config::from_text("# comment\nn = 1000\nE=0.1,0.2\n\nout = /tmp/x\n");
  CHECK(c.get_int("n", 0) == 1000);
  CHECK(c.get_grid("E", "1") == std::vector<double>{0.1, 0.2});
  CHECK(c.get("missing", "dflt") == "dflt");
  CHECK(c.canonical() == "E=0.1,0.2\nn=1000\n");

  auto d = Config::from_text("n=1000\nE=0.1,0.2\nthreads=3\n");
  CHECK(c.hash() == d.hash());
  CHECK(c.hash().size() == 64);
  d.set("n", "1001");
  CHECK(c.hash() != d.hash());

  CHECK_THROWS_AS(Config::from_text("no equals sign"), ParameterError);
  CHECK_THROWS_AS(c.require_known({"n"}), ParameterError);
  CHECK_NOTHROW(c.require_known({"n", "E"}));  // out/threads are always accepted
  CHECK_THROWS_AS(Config::from_file("/nonexistent/file.cfg"), IoError);
  CHECK(Config::from_text("f=true").get_bool("f", false));
  CHECK_THROWS_AS(Config::from_text("f=maybe").get_bool("f", false), ParameterError);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("provenance header") {
  const auto h = provenance_header("ids", "abcd", "42");
  CHECK(h.find(kToolName) != std::string::npos);
  CHECK(h.find("abcd") != std::string::npos);
  CHECK(h.find("42") != std::string::npos);
}

namespace {
int code_of(const std::function<void()>& f) {
  std::ostringstream err;
  try {
    f();
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
  return 0;
}
}  // namespace

TEST_CASE("exit codes") {
  CHECK(code_of([] { throw ParameterError("p"); }) == kValidation);
  CHECK(code_of([] { throw DomainError("d"); }) == kValidation);
  CHECK(code_of([] { throw CoverageError("c"); }) == kValidation);
  CHECK(code_of([] { throw CapacityError("c"); }) == kValidation);
  CHECK(code_of([] { throw NumericalError("n"); }) == kNumerical);
  CHECK(code_of([] { throw IoError("i"); }) == kIo);
}

TEST_CASE("command table") {
  for (const char* name : {"lyapunov", "ids", "eigenfunction", "moments-direct", "moments-avg",
                           "green", "prufer-ldt", "martingale", "thouless", "hyperbolic",
                           "borel", "figure", "verify"}) {
    INFO(name);
    CHECK(find_command(name) != nullptr);
  }
  CHECK(find_command("nope") == nullptr);
  std::ostringstream log;
  auto cfg = Config::from_text("bogus=1");
  CHECK_THROWS_AS(run_command(*find_command("ids"), cfg, log), ParameterError);
}
