#pragma once

// qsem command-line workbench. run() is the whole program minus process
// plumbing so tests can drive it in-process.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace qsem::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

struct Config {
  std::string weighting = "tfidf";
  std::uint64_t min_df = 1;
  double tolerance = 1e-10;
  double smoothing = 0.1;
  std::uint64_t seed = 42;
  std::uint64_t top_k = 10;
};

// JSON object whose keys are a subset of Config's field names; unknown keys
// and out-of-range values throw qsem::InvalidArgument.
Config parse_config(std::string_view json_text);

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qsem::cli
