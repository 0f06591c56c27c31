// One pass/fail line per acceptance criterion; failing checks are listed
// underneath.

#include <algorithm>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "adhesim/acceptance.hpp"
#include "adhesim/output.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adhesim acceptance criteria"};
  std::vector<int> only;
  std::vector<int> expected_failures;
  int jobs = 1;
  app.add_option("--only", only, "criterion ids to run")->delimiter(',');
  app.add_option("--expect-fail", expected_failures,
                 "criteria known to fail; reported as FAIL but not counted in the exit status")
      ->delimiter(',');
  app.add_option("--jobs", jobs, "criteria run concurrently")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<int> ids = only.empty() ? adhesim::criterion_ids() : only;
  const auto results = adhesim::run_acceptance(ids, jobs);
  int unexpected = 0;
  for (const auto& r : results) {
    const bool known =
        std::find(expected_failures.begin(), expected_failures.end(), r.id) != expected_failures.end();
    std::printf("criterion %d %s  %s  (%.2f s of %.0f s)%s\n", r.id, r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.seconds, r.budget, !r.pass && known ? "  [known failure]" : "");
    for (const auto& c : r.checks)
      if (!c.pass)
        std::printf("    %s = %s (tolerance %s)\n", c.name.c_str(), adhesim::fmt(c.value).c_str(),
                    adhesim::fmt(c.tolerance).c_str());
    if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
    if (!r.pass && !known) ++unexpected;
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
