#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "bsdelab/core/coefficients.hpp"
#include "bsdelab/core/generator.hpp"

namespace bsdelab {

// Anchor (y, x, q) of the local driver comparison, with the constants that
// define the penalty weight lambda = gamma * (1 + 2|q|^2 nu^2).
struct LocalizationContext {
  double y = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd q;
  double gamma = 1.0;
  double nu = 1.0;

  double lambda() const { return gamma + 2.0 * gamma * q.squaredNorm() * nu * nu; }
};

struct LocalizationProbe {
  double y_bar = 0.0;
  Eigen::VectorXd z_bar;
  Eigen::VectorXd x_bar;
};

struct LocalizationReport {
  int n = 0;
  double psi = 0.0;       // |psi1 - f0| + |psi2 - f0|
  double psi1 = 0.0;      // penalized sup at the anchor
  double psi2 = 0.0;      // penalized inf at the anchor
  double f_anchor = 0.0;  // g(t, y, sigma^*(t,x) q)
  double alpha_t = 0.0;
  double psi_cap = 0.0;   // 4*alpha_t + M
  bool psi_bound_ok = true;
  bool inequality_ok = true;  // driver-difference bound on every probe
  double worst_slack = 0.0;   // min over probes of rhs - lhs
  std::string worst_probe;
  int n_probes = 0;
};

// Evaluates the localization error term psi^n at (t; y, x, q) from the
// penalized sup/inf envelopes of f(t,u,v,w) = g(t, u, v + sigma^*(t,w) q),
// then checks on every probe (y_bar, z_bar, x_bar):
//   |g(t, y_bar, z_bar + sigma^*(t,x_bar) q) - g(t, y, sigma^*(t,x) q)|
//     <= (n/2) phi(2|y_bar - y|) + 2 n lambda (|z_bar|^2 + |x_bar - x|^2) + psi^n.
// Probe points are injected into the sup/inf candidate sets so the computed
// envelopes dominate them by construction; the lattice supplies the rest.
// `alpha_value` fixes the realization of the alpha channel; pass a negative
// value to use the deterministic alpha at t (path-functional alpha then
// throws).
LocalizationReport generator_localization(const GeneratorSpec& gen,
                                          const LocalizationContext& ctx,
                                          const SdeCoefficients& coeffs, int n, double t,
                                          const std::vector<LocalizationProbe>& probes,
                                          double alpha_value = -1.0);

}  // namespace bsdelab
