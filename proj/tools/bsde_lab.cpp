#include <CLI11.hpp>
#include <cstdint>
#include <string>

#include "bsdelab/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bsde_lab: configuration-driven BSDE experiment runner"};
  app.set_help_flag("-h,--help", "print usage and exit");

  bsdelab::cli::CliOptions opts;
  std::uint64_t seed = 0;
  app.add_option("--config", opts.config_path, "JSON experiment config")->required();
  app.add_option("--out-dir", opts.out_dir, "directory for CSV/JSON reports");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_flag("--quiet", opts.quiet, "suppress the verdict summary line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 returns 0 for --help; anything else is a usage error.
    return code == 0 ? 0 : bsdelab::cli::kExitConfigError;
  }

  if (seed_opt->count() > 0) opts.seed_override = seed;
  return bsdelab::cli::run(opts);
}
