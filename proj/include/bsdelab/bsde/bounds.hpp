#pragma once

#include <string>

#include "bsdelab/bsde/solver.hpp"
#include "bsdelab/core/generator.hpp"

namespace bsdelab {

// Default multiplicative slack for the a-priori bound checks; covers time
// discretization and regression noise on the shipped presets.
inline constexpr double kBoundSlack = 0.05;

struct BoundReport {
  bool applicable = true;  // false when the needed alpha bound is undeclared
  bool pass = false;
  double bound = 0.0;     // analytic right-hand side
  double observed = 0.0;  // empirical essential sup of |Y|
  double margin = 0.0;    // bound - observed
  std::string detail;
};

// Global estimate: sup |Y| <= e^{beta T} (||xi||_inf + ||int_0^T alpha||_inf),
// with the sups replaced by per-sample maxima ("empirical essential sup").
BoundReport check_bound_global(const BsdeSolution& sol, const GeneratorSpec& gen,
                               const Eigen::VectorXd& terminal, double slack = kBoundSlack);

// Small-horizon estimate for terminal value 0 on a window of length eps:
// sup |Y| <= eps e^{beta eps} ||alpha||_inf (needs sup_bound) or
// sup |Y| <= e^{beta eps} ||int alpha||_inf (needs integral_sup_bound).
// The tighter applicable bound is reported.
BoundReport check_bound_small_horizon(const BsdeSolution& sol, const GeneratorSpec& gen,
                                      double slack = kBoundSlack);

}  // namespace bsdelab
