#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "bsdelab/bsde/solver.hpp"
#include "bsdelab/core/coefficients.hpp"
#include "bsdelab/core/generator.hpp"

namespace bsdelab {

enum class RepresentationMode { L1, Lp, Pathwise };

// One difference-quotient experiment: anchored at (t, x, y, q), the driver
// value g(t, y, sigma^*(t,x) q) + q . b(t, x) is recovered as the small-eps
// limit of (Y_t - y) / eps for the stopped terminal y + q.(X_{t+eps^tau} - x).
struct RepresentationTask {
  GeneratorSpec gen;
  SdeCoefficients coeffs;
  double t = 0.0;
  Eigen::VectorXd x;
  double y = 0.0;
  Eigen::VectorXd q;
  double horizon = 1.0;  // T
  double c0 = 5.0;       // stopping radius, > |x|
  std::vector<double> epsilons;  // strictly decreasing, within (0, T - t]
  RepresentationMode mode = RepresentationMode::L1;
  double p = 1.0;  // moment order for Lp mode
  SolverConfig solver;
  int n_paths = 1 << 14;
  int n_steps = 64;  // per-eps grid resolution (fixed relative to eps)
  std::uint64_t seed = 1;
  // Each quotient is the mean over this many independent solves (paths and
  // regressions both re-drawn), and its error bar is the spread across them;
  // a single shared fit hides coefficient noise that per-path deviations
  // cannot price. 1 disables the split.
  int n_replicates = 8;
  // Pathwise mode: the almost-sure statement is probed at these extra
  // conditioning states (re-anchored runs); empty = x plus small shifts.
  std::vector<Eigen::VectorXd> conditioning_states;
};

// Exact anchor value g(t, y, sigma^*(t,x) q) + q . b(t, x); no discretization.
double representation_target(const RepresentationTask& task);

// Alpha realization for anchored driver evaluations: the declared value for
// deterministic kinds; for the path-functional kind, the value on the
// just-started path (B = 0), which is the realization every window at t sees.
double anchor_alpha(const GeneratorSpec& gen, double t);

struct QuotientEstimate {
  double epsilon = 0.0;
  double estimate = 0.0;   // D_eps, averaged over replicate solves
  double std_error = 0.0;  // replicate spread / sqrt(n_replicates)
  // |D_eps - target|. The anchor conditions on a trivial sigma-field, so the
  // conditional quotient is deterministic and every L^p error of it collapses
  // to the absolute error of the estimate.
  double error_moment = 0.0;
  int n_stopped = 0;  // paths that exited the C0-ball before eps
};

// Default geometric schedule {2^-2, ..., 2^-7} * (T - t).
std::vector<double> default_epsilon_schedule(double window);

QuotientEstimate difference_quotient(const RepresentationTask& task, double epsilon,
                                     std::uint64_t sub_seed);

struct ConvergenceRow {
  double epsilon = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double abs_error = 0.0;  // per-mode error column
};

enum class Verdict { Pass, Fail, Inconclusive };

struct ConvergenceReport {
  double target = 0.0;
  std::vector<ConvergenceRow> rows;  // ordered by decreasing epsilon
  double fitted_limit = 0.0;
  double fitted_limit_se = 0.0;
  double fitted_rate = 0.0;  // NaN when no rate fit was possible
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

// Tolerances of the sweep verdict; an estimate counts as resolving the bias
// only when its error exceeds kReliableSigma standard errors.
inline constexpr double kSweepRelTol = 0.05;
inline constexpr double kSweepAbsTol = 0.01;
inline constexpr double kReliableSigma = 3.0;

// Runs difference_quotient across the schedule; fits the error decay rate on
// the noise-resolving rows, Richardson-extrapolates the last two of them
// (skipped below rate 0.5), and issues Pass/Fail/Inconclusive.
ConvergenceReport epsilon_sweep(const RepresentationTask& task);

// Same sweep with the p-th moment error column; requires a declared alpha
// sup bound (the moment statement needs it) and p > 0.
ConvergenceReport lp_sweep(const RepresentationTask& task);

// Pathwise probe: epsilon_sweep re-anchored at each conditioning state.
struct PathwiseReport {
  std::vector<Eigen::VectorXd> states;
  std::vector<ConvergenceReport> reports;
  Verdict verdict = Verdict::Inconclusive;
};
PathwiseReport pathwise_sweep(const RepresentationTask& task);

struct DecayRow {
  double epsilon = 0.0;
  double energy = 0.0;  // (1/eps) E[sum |Z_k|^2 dt]
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double first = 0.0;
  double final = 0.0;
  bool pass = false;
  std::string note;
};

inline constexpr double kEnergyAtol = 1e-2;

// Z-energy of the terminal-0 BSDE over shrinking windows; passes when the
// final energy is below 0.2x the first and below kEnergyAtol.
DecayReport z_energy_decay(const RepresentationTask& task);

}  // namespace bsdelab
