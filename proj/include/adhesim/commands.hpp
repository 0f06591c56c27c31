#pragma once

// Subcommand pipelines behind the adhesim executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace adhesim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitVerify = 4 };

struct CommandOptions {
  std::string command;
  std::string config;  // may be empty for verify
  std::string out_dir = "./out";
  std::optional<std::uint64_t> seed;  // overrides ic.seed
  bool svg = false;
  int jobs = 1;
};

/// Runs one subcommand; errors are caught and mapped to exit codes with a
/// one-line diagnostic on `err`.
int dispatch(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace adhesim
