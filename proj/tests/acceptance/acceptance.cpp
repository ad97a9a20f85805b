// Acceptance gate: one self-timed criterion per line, library-level checks
// with the tolerances pinned here. Run all criteria or a single one with
// --only N; the exit status is nonzero as soon as any executed criterion
// fails its checks or its runtime budget.

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bsdelab/approx/inf_convolution.hpp"
#include "bsdelab/approx/localization.hpp"
#include "bsdelab/bsde/bounds.hpp"
#include "bsdelab/bsde/oracles.hpp"
#include "bsdelab/bsde/solver.hpp"
#include "bsdelab/cli/runner.hpp"
#include "bsdelab/compare/comparison.hpp"
#include "bsdelab/core/presets.hpp"
#include "bsdelab/report/report.hpp"
#include "bsdelab/repr/representation.hpp"
#include "bsdelab/sde/paths.hpp"
#include "bsdelab/sde/rng.hpp"

using namespace bsdelab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Eigen::VectorXd v1(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

std::string num(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

BsdeSolution solve_terminal(const GeneratorSpec& gen, const Eigen::VectorXd& terminal,
                            const PathEnsemble& b) {
  return solve_bsde(gen, terminal, b, nullptr, nullptr, SolverConfig{});
}

// -------------------------------------------------------------- criterion 1
// Linear driver against the closed form: g = -y, terminal 1, horizon 1.
Outcome criterion1() {
  const int n_paths = 100000, n_steps = 64;
  const GeneratorSpec gen = make_generator("linear_y", {});  // beta = 1
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, n_steps);
  const PathEnsemble b = simulate_brownian(grid, 1, n_paths, 101);
  const BsdeSolution sol = solve_terminal(gen, Eigen::VectorXd::Ones(n_paths), b);
  const double target = oracle_linear(1.0, 1.0, 1.0);  // e^{-1}
  const double err = std::abs(sol.y0 - target);

  Outcome out;
  out.pass = err <= 5e-3;
  out.detail = "|Y0 - e^-1| = " + num(err) + " (Y0 " + num(sol.y0) + ", tol 5e-3)";
  return out;
}

// -------------------------------------------------------------- criterion 2
// Quadratic driver against the exponential-transform oracle.
Outcome criterion2() {
  // The 1e5 paths are split over independent replicate solves, because the
  // regression coefficients of a single solve are shared by every path: the
  // per-path spread cannot see their noise, and the replicate spread can.
  // A degree-5 basis keeps the fit bias of the sigmoid-shaped Z profile
  // (the clipped terminal saturates) below that noise.
  const int n_paths = 100000, n_steps = 128, k_rep = 8;
  GeneratorParams gp;
  gp.gamma = 1.0;
  const GeneratorSpec gen = make_generator("pure_quadratic", gp);
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, n_steps);
  SolverConfig sc;
  sc.basis = RegressionBasis::polynomial(5);

  Eigen::VectorXd y0s(k_rep);
  for (int r = 0; r < k_rep; ++r) {
    const int np = n_paths / k_rep;
    const PathEnsemble b = simulate_brownian(grid, 1, np, 2020 + r);
    Eigen::VectorXd xi(np);
    for (int p = 0; p < np; ++p) xi[p] = std::clamp(b.state(p, n_steps)[0], -2.0, 2.0);
    y0s[r] = solve_bsde(gen, xi, b, nullptr, nullptr, sc).y0;
  }
  const double y0 = y0s.mean();
  const double se_solve =
      std::sqrt((y0s.array() - y0).square().sum() / (k_rep - 1.0) / k_rep);

  const int m = 8000000;  // independent oracle sample
  Eigen::VectorXd samples(m);
  for (int p = 0; p < m; ++p)
    samples[p] = std::clamp(gaussian_at(203, static_cast<std::uint64_t>(p), 0, 0), -2.0, 2.0);
  const MonteCarloEstimate ch = cole_hopf(1.0, samples);

  const double combined = std::hypot(se_solve, ch.std_error);
  const double err = std::abs(y0 - ch.value);
  Outcome out;
  out.pass = err <= 3.0 * combined;
  out.detail = "|Y0 - CH| = " + num(err) + " vs 3 se = " + num(3.0 * combined) + " (Y0 " +
               num(y0) + ", CH " + num(ch.value) + ")";
  return out;
}

// -------------------------------------------------------------- criterion 3
// Representation limit for the purely quadratic driver: constant 0.5.
Outcome criterion3() {
  RepresentationTask task;
  GeneratorParams gp;
  gp.gamma = 1.0;
  task.gen = make_generator("pure_quadratic", gp);
  task.coeffs = make_coefficients("brownian", {}, 1, 1);
  task.x = v1(0.0);
  task.y = 0.0;
  task.q = v1(1.0);
  task.n_paths = 131072;
  task.n_steps = 64;
  task.seed = 11;
  task.epsilons = default_epsilon_schedule(1.0);
  const ConvergenceReport rep = epsilon_sweep(task);

  Outcome out;
  int worst_row = -1;
  double worst_sigmas = 0.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const double sig = std::abs(rep.rows[i].estimate - 0.5) /
                       std::max(rep.rows[i].std_error, 1e-15);
    if (sig > worst_sigmas) {
      worst_sigmas = sig;
      worst_row = static_cast<int>(i);
    }
    if (std::abs(rep.rows[i].estimate - 0.5) > 3.0 * rep.rows[i].std_error) out.pass = false;
  }
  const double lim_err = std::abs(rep.fitted_limit - 0.5);
  if (!(lim_err <= 0.01 * 0.5)) out.pass = false;
  out.detail = "worst row " + std::to_string(worst_row) + " at " + num(worst_sigmas, 3) +
               " se (gate 3); fitted_limit " + num(rep.fitted_limit) + " (err " +
               num(lim_err / 0.5 * 100.0, 3) + "%, gate 1%)";
  return out;
}

// -------------------------------------------------------------- criterion 4
// Representation limit with drift: g(0,1,q) + q.b = -1 + 0.3 = -0.7.
Outcome criterion4() {
  RepresentationTask task;
  GeneratorParams gp;
  gp.beta = 1.0;
  task.gen = make_generator("linear_y", gp);
  CoefficientParams cp;
  cp.b0 = 0.3;
  task.coeffs = make_coefficients("constant_drift", cp, 1, 1);
  task.x = v1(0.0);
  task.y = 1.0;
  task.q = v1(1.0);
  task.c0 = 5.0;
  task.n_paths = 131072;
  task.n_steps = 64;
  task.seed = 7;
  task.epsilons = default_epsilon_schedule(1.0);
  const ConvergenceReport rep = epsilon_sweep(task);

  const double target = -0.7;
  const double rel_err = std::abs(rep.fitted_limit - target) / std::abs(target);
  Outcome out;
  out.pass = rel_err <= 0.05 && rep.fitted_rate >= 0.8;
  out.detail = "fitted_limit " + num(rep.fitted_limit) + " (err " + num(rel_err * 100.0, 3) +
               "%, gate 5%), rate " + num(rep.fitted_rate, 4) + " (gate 0.8)";
  return out;
}

// -------------------------------------------------------------- criterion 5
// Penalized-envelope sequence for f(x) = x^2: closed form, monotonicity and
// the growth bound itself.
Outcome criterion5() {
  InfConvSpec spec;
  spec.f = [](Eigen::Ref<const Eigen::VectorXd> x) { return x.squaredNorm(); };
  spec.dim = 1;
  spec.a = 0.0;
  spec.K = 1.0;
  spec.phi = ConvexModulus::power(2.0);
  spec.name = "square";

  Outcome out;
  double worst_closed = 0.0;
  std::vector<int> schedule;
  for (int n = 1; n <= 256; n *= 2) {
    schedule.push_back(n);
    const double got = inf_convolution(spec, n, v1(1.0));
    const double want = 2.0 * n / (2.0 * n + 1.0);
    worst_closed = std::max(worst_closed, std::abs(got - want));
  }
  if (!(worst_closed <= 1e-6)) out.pass = false;

  std::vector<Eigen::VectorXd> grid;
  for (int i = 0; i < 101; ++i) grid.push_back(v1(-5.0 + 10.0 * i / 100.0));
  const SequenceReport rep = approx_sequence_check(spec, grid, schedule);

  double prev = -std::numeric_limits<double>::infinity();
  double worst_mono = 0.0, worst_bound = 0.0;
  for (const SequencePoint& pt : rep.points) {
    if (pt.n == schedule.front()) prev = -std::numeric_limits<double>::infinity();
    worst_mono = std::max(worst_mono, prev - pt.value);
    worst_bound = std::max(worst_bound, std::abs(pt.value) - pt.envelope);
    prev = pt.value;
  }
  if (!(worst_mono <= 1e-8)) out.pass = false;    // f_{n+1} >= f_n - 1e-8
  if (!(worst_bound <= 1e-9)) out.pass = false;   // never above the envelope

  out.detail = "closed-form err " + num(worst_closed, 3) + " (gate 1e-6); worst monotone drop " +
               num(worst_mono, 3) + " (gate 1e-8); worst envelope excess " + num(worst_bound, 3) +
               " (gate 1e-9)";
  return out;
}

// -------------------------------------------------------------- criterion 6
// Local driver-difference inequality on a 1000-probe lattice.
Outcome criterion6() {
  GeneratorParams gp;
  gp.gamma = 1.0;
  const GeneratorSpec gen = make_generator("pure_quadratic", gp);
  const SdeCoefficients coeffs = make_coefficients("brownian", {}, 1, 1);
  LocalizationContext ctx;
  ctx.y = 0.0;
  ctx.x = v1(0.0);
  ctx.q = v1(1.0);
  ctx.gamma = 1.0;
  ctx.nu = coeffs.nu;

  std::vector<LocalizationProbe> probes;
  for (int iy = 0; iy < 10; ++iy)
    for (int iz = 0; iz < 10; ++iz)
      for (int ix = 0; ix < 10; ++ix) {
        LocalizationProbe p;
        p.y_bar = -2.0 + 4.0 * iy / 9.0;
        p.z_bar = v1(-2.0 + 4.0 * iz / 9.0);
        p.x_bar = v1(-2.0 + 4.0 * ix / 9.0);
        probes.push_back(std::move(p));
      }

  Outcome out;
  double prev_psi = std::numeric_limits<double>::infinity();
  std::string psis;
  for (int n : {8, 32, 128}) {
    const LocalizationReport rep = generator_localization(gen, ctx, coeffs, n, 0.0, probes);
    if (!rep.inequality_ok || rep.worst_slack < 0.0) out.pass = false;
    if (!(rep.psi <= prev_psi + 1e-12)) out.pass = false;  // psi^n decreasing
    prev_psi = rep.psi;
    if (!psis.empty()) psis += " -> ";
    psis += num(rep.psi, 4);
  }
  out.detail = "1000 probes, zero violations at n in {8,32,128}; psi " + psis;
  return out;
}

// -------------------------------------------------------------- criterion 7
// Z-energy of the zero-terminal window vanishes with the window.
Outcome criterion7() {
  RepresentationTask task;
  task.gen = make_generator("mixed", {});
  task.coeffs = make_coefficients("brownian", {}, 1, 1);
  task.x = v1(0.0);
  task.q = v1(1.0);
  task.n_paths = 16384;
  task.n_steps = 32;
  task.seed = 5;
  task.epsilons = {0.2, 0.1, 0.05, 0.025};
  const DecayReport rep = z_energy_decay(task);

  Outcome out;
  out.pass = rep.final < 0.2 * rep.first && rep.final < 1e-2;
  out.detail = "energy " + num(rep.first, 4) + " -> " + num(rep.final, 4) +
               " (gates: < 0.2x first, < 1e-2)";
  return out;
}

// -------------------------------------------------------------- criterion 8
// A-priori sup bounds on every preset, plus the two equality cases.
Outcome criterion8() {
  Outcome out;
  std::string failed;
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 32);
  const PathEnsemble b = simulate_brownian(grid, 1, 4096, 808);

  for (const char* preset : {"zero", "linear_y", "pure_quadratic", "constant_driver", "mixed"}) {
    const GeneratorSpec gen = make_generator(preset, {});
    const BsdeSolution s1 = solve_terminal(gen, Eigen::VectorXd::Ones(b.n_paths), b);
    const BoundReport global = check_bound_global(s1, gen, Eigen::VectorXd::Ones(b.n_paths));
    const BsdeSolution s0 = solve_terminal(gen, Eigen::VectorXd::Zero(b.n_paths), b);
    const BoundReport small = check_bound_small_horizon(s0, gen);
    if (!global.applicable || !global.pass || !small.applicable || !small.pass) {
      out.pass = false;
      failed += std::string(" ") + preset;
    }
  }

  // equality case 1: g = 0, terminal 1 -> sup |Y| = bound = 1
  {
    const GeneratorSpec gen = make_generator("zero", {});
    const BsdeSolution s = solve_terminal(gen, Eigen::VectorXd::Ones(b.n_paths), b);
    const BoundReport rep = check_bound_global(s, gen, Eigen::VectorXd::Ones(b.n_paths));
    if (std::abs(rep.observed - rep.bound) > 1e-6) {
      out.pass = false;
      failed += " zero-equality";
    }
  }
  // equality case 2: g = alpha constant, terminal 0 -> sup |Y| = alpha*T
  {
    const GeneratorSpec gen = make_generator("constant_driver", {});  // alpha0 = 0.5
    const BsdeSolution s = solve_terminal(gen, Eigen::VectorXd::Zero(b.n_paths), b);
    const BoundReport g = check_bound_global(s, gen, Eigen::VectorXd::Zero(b.n_paths));
    const BoundReport sh = check_bound_small_horizon(s, gen);
    if (std::abs(g.observed - g.bound) > 1e-6 || std::abs(sh.observed - sh.bound) > 1e-6) {
      out.pass = false;
      failed += " constant-equality";
    }
  }

  out.detail = out.pass ? "global + small-horizon bounds hold on all 5 presets; "
                          "both equality cases within 1e-6"
                        : "failing:" + failed;
  return out;
}

// -------------------------------------------------------------- criterion 9
// Driver ordering recovered from solution ordering, and its contrapositive.
Outcome criterion9() {
  GeneratorParams gp;
  gp.beta = 1.0;
  const GeneratorSpec g2 = make_generator("linear_y", gp);
  gp.offset = 0.5;
  const GeneratorSpec g1 = make_generator("linear_y", gp);  // g1 = g2 + 0.5

  std::vector<std::pair<double, Eigen::VectorXd>> probes;
  for (double y : {-1.0, 0.0, 1.0})
    for (double z : {-1.0, 0.0, 1.0}) probes.emplace_back(y, v1(z));

  CompareConfig cfg;
  cfg.epsilons = {0.25, 0.125, 0.0625, 0.03125};
  cfg.seed = 909;
  const GeneratorOrderReport rep = converse_compare(g1, g2, probes, cfg);

  Outcome out;
  if (!rep.hypothesis_ok || rep.verdict != Verdict::Pass) out.pass = false;
  double worst_lo = 1.0, worst_hi = 0.0;
  for (const ProbeRow& row : rep.rows) {
    const double diff = row.limit1 - row.limit2;
    worst_lo = std::min(worst_lo, diff);
    worst_hi = std::max(worst_hi, diff);
    if (diff < 0.45 || diff > 0.55) out.pass = false;
  }

  const GeneratorOrderReport contra = converse_compare(g2, g1, probes, cfg);
  const bool contra_ok = !contra.hypothesis_ok && contra.verdict == Verdict::Inconclusive &&
                         contra.note.find("hypothesis") != std::string::npos;
  if (!contra_ok) out.pass = false;

  out.detail = "9 probes, limit differences in [" + num(worst_lo, 4) + ", " + num(worst_hi, 4) +
               "] (gate [0.45, 0.55]); contrapositive " +
               (contra_ok ? "reported the violation" : "MISSED the violation");
  return out;
}

// ------------------------------------------------------------- criterion 10
// Re-running a config with the same seed reproduces the report bytes.
namespace c10 {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Runs the config twice into fresh directories and compares all outputs.
bool reproduces(const nlohmann::json& cfg, const fs::path& dir, std::string& detail) {
  fs::create_directories(dir);
  write_json_file((dir / "config.json").string(), cfg);
  for (const char* leaf : {"a", "b"}) {
    cli::CliOptions opts;
    opts.config_path = (dir / "config.json").string();
    opts.out_dir = (dir / leaf).string();
    opts.quiet = true;
    const int rc = cli::run(opts);
    if (rc != cli::kExitPass && rc != cli::kExitFail && rc != cli::kExitInconclusive) {
      detail += " [config " + cfg.at("command").get<std::string>() + " errored]";
      return false;
    }
  }
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const fs::path name = entry.path().filename();
    if (slurp(entry.path()) != slurp(dir / "b" / name)) {
      detail += " [" + cfg.at("command").get<std::string>() + "/" + name.string() + " differs]";
      return false;
    }
  }
  return true;
}

}  // namespace c10

Outcome criterion10() {
  using nlohmann::json;
  const fs::path root = fs::temp_directory_path() / "bsdelab_acceptance_c10";
  fs::remove_all(root);

  std::vector<json> configs;
  configs.push_back(json{
      {"command", "solve"},
      {"seed", 101},
      {"generator", json{{"preset", "linear_y"}}},
      {"terminal", json{{"kind", "constant"}, {"value", 1.0}}},
      {"n_paths", 20000},
      {"n_steps", 64}});
  configs.push_back(json{
      {"command", "represent"},
      {"seed", 11},
      {"generator", json{{"preset", "pure_quadratic"}}},
      {"coefficients", json{{"preset", "brownian"}}},
      {"n_paths", 16384},
      {"n_steps", 64}});
  configs.push_back(json{
      {"command", "approx"},
      {"seed", 1},
      {"approx",
       json{{"f", "square"},
            {"n_schedule", {1, 2, 4, 8, 16, 32, 64, 128, 256}},
            {"x_grid", json{{"lo", -5.0}, {"hi", 5.0}, {"n", 101}}}}}});

  Outcome out;
  int i = 0;
  for (const json& cfg : configs) {
    if (!c10::reproduces(cfg, root / ("cfg" + std::to_string(i++)), out.detail)) out.pass = false;
  }
  if (out.pass)
    out.detail = "solve, represent and approx configs re-ran byte-identically (seeds fixed)";
  else
    out.detail = "mismatch:" + out.detail;
  return out;
}

// ------------------------------------------------------------------- driver

constexpr int kBudgetSeconds[10] = {30, 60, 120, 180, 10, 30, 120, 60, 180, 120};

Outcome run_criterion(int n) {
  switch (n) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8();
    case 9: return criterion9();
    case 10: return criterion10();
  }
  return {false, "unknown criterion"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > 10) {
        std::fprintf(stderr, "--only expects a criterion number in 1..10\n");
        return 1;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 1;
    }
  }

  bool all_pass = true;
  for (int n = 1; n <= 10; ++n) {
    if (only && n != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run_criterion(n);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < kBudgetSeconds[n - 1];
    const bool pass = out.pass && in_budget;
    all_pass = all_pass && pass;
    std::printf("criterion %d: %s - %s; %.1fs (budget %ds)\n", n, pass ? "PASS" : "FAIL",
                out.detail.c_str(), secs, kBudgetSeconds[n - 1]);
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
