#pragma once

#include <Eigen/Core>

#include "bsdelab/bsde/regression.hpp"

namespace bsdelab {

// Closed form for the driver g(y) = -beta*y with constant terminal c:
// Y_t = c * exp(-beta * (T - t)).
double oracle_linear(double beta, double terminal_constant, double horizon);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n = 0;
};

// Exponential-transform value (1/gamma) log E[exp(gamma xi)] for the purely
// quadratic driver g = (gamma/2)|z|^2, with a delta-method standard error.
// Stabilized through log-sum-exp, so it only fails on non-finite samples.
MonteCarloEstimate cole_hopf(double gamma, const Eigen::VectorXd& xi_samples);

// Conditional variant: per-path (1/gamma) log E[exp(gamma xi) | state at
// `step`], the conditional expectation replaced by a basis regression.
Eigen::VectorXd cole_hopf_conditional(double gamma, const Eigen::VectorXd& xi_samples,
                                      const RegressionBasis& basis, const PathEnsemble& states,
                                      int step);

// Nodes and weights of Gauss-Hermite quadrature against the standard normal
// density: E[f(N(0,1))] ~= sum_i w_i f(x_i). Computed from the Jacobi matrix
// (Golub-Welsch), no tabulated constants.
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussHermiteRule gauss_hermite(int n_nodes);

// E[f(B_T)] for scalar Brownian motion via the rule above.
double expect_brownian_terminal(const std::function<double(double)>& f, double horizon,
                                int n_nodes = 64);

}  // namespace bsdelab
