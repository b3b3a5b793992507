#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace procure::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kViolationsFound = 1;
inline constexpr int kInputError = 2;
inline constexpr int kUnknownMechanism = 3;
inline constexpr int kBenchmarkInvalid = 4;

struct CliConfig {
  std::string command;
  std::optional<std::string> instance_path;
  std::optional<std::string> generator_spec;
  std::string mechanism;
  std::string benchmark = "f2";
  std::size_t trials = 10000;
  std::optional<std::uint64_t> seed;
  bool exact = false;
  std::string dims = "valuation";
  std::optional<std::size_t> monotone_grid;
  std::optional<std::int64_t> demand_cap;
  std::string format = "json";
  std::optional<std::string> out_path;
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code. Reports go to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace procure::cli
