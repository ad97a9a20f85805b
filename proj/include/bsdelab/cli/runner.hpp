#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace bsdelab::cli {

// Normative exit-code contract (CI gates on it).
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;          // a checked property failed
inline constexpr int kExitInconclusive = 2;  // could not decide (noise, divergence)
inline constexpr int kExitConfigError = 3;

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;  // takes precedence over the config seed
  bool quiet = false;
};

// Loads the JSON config, runs the named command, writes the CSV and JSON
// reports into out_dir and returns the exit status. Diagnostics go to
// stderr; the one-line verdict summary goes to stdout unless quiet.
int run(const CliOptions& opts);

}  // namespace bsdelab::cli
