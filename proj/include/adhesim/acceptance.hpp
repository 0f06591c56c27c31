#pragma once

// Executable acceptance criteria shared by `adhesim verify` and the
// acceptance test binary.

#include <string>
#include <vector>

#include "adhesim/diagnostics.hpp"

namespace adhesim {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<Check> checks;  // the last one is always the runtime check
  double seconds = 0.0;       // CPU time of the thread that ran it
  double budget = 0.0;
  std::string error;  // message of an exception that aborted the criterion
};

/// Ids 1..9.
std::vector<int> criterion_ids();
std::string criterion_name(int id);

/// Runs one criterion. Numerical errors inside a criterion are caught and
/// reported as a failed check named "<prefix>.error".
CriterionResult run_criterion(int id);

/// Runs the given criteria on up to `jobs` threads; results keep id order.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, int jobs);

}  // namespace adhesim
