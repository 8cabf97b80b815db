#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace divgrad::lab {

struct CriterionResult {
  std::string id;
  std::string title;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string csv;  // data behind the verdict; compared byte-wise by A14
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds = 0.0;
  bool fast = false;  // cheap enough at full scale for the fast suite
  std::function<CriterionResult()> run;
};

/// A1 … A13 at the scales fixed by the acceptance criteria.
const std::vector<Criterion>& criteria();

enum class Suite { fast, full };

struct SuiteOptions {
  Suite suite = Suite::full;
  std::vector<std::string> only;  // criterion ids to run; empty means all of the suite
  bool determinism = true;        // append A14
};

/// Runs the suite, printing one line per criterion to `log`. A14 reruns every
/// criterion that ran with 1 and 8 workers and compares the CSV bytes.
std::vector<CriterionResult> run_suite(const SuiteOptions& opt, std::ostream& log);

/// Machine-readable report (validated by the shipped schema).
std::string report_json(const std::vector<CriterionResult>& results, const std::string& suite);

/// One "[PASS] A1 ..." line.
std::string format_line(const CriterionResult& r);

}  // namespace divgrad::lab
