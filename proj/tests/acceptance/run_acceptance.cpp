#include <iostream>

#include "divgrad/lab/acceptance.hpp"

int main() {
  divgrad::lab::SuiteOptions opt;
  opt.suite = divgrad::lab::Suite::full;
  const auto results = divgrad::lab::run_suite(opt, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << '\n';
  return failed == 0 ? 0 : 1;
}
