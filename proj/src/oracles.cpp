#include "bsdelab/bsde/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "bsdelab/core/errors.hpp"

namespace bsdelab {

double oracle_linear(double beta, double terminal_constant, double horizon) {
  if (horizon < 0.0) throw std::invalid_argument("oracle_linear: horizon must be >= 0");
  return terminal_constant * std::exp(-beta * horizon);
}

MonteCarloEstimate cole_hopf(double gamma, const Eigen::VectorXd& xi_samples) {
  if (!(gamma > 0.0)) throw std::invalid_argument("cole_hopf: gamma must be > 0");
  const Eigen::Index n = xi_samples.size();
  if (n < 1) throw std::invalid_argument("cole_hopf: empty sample");
  if (!xi_samples.allFinite())
    throw EvaluationError("cole_hopf: non-finite terminal sample; rescale the terminal",
                          "exp(gamma*xi)");
  const double shift = gamma * xi_samples.maxCoeff();
  // exp(gamma*xi - shift) is in (0, 1]; no overflow possible.
  const Eigen::ArrayXd e = (gamma * xi_samples.array() - shift).exp();
  const double mean = e.mean();
  MonteCarloEstimate out;
  out.n = static_cast<int>(n);
  out.value = (shift + std::log(mean)) / gamma;
  if (n > 1) {
    const double var = (e - mean).square().sum() / static_cast<double>(n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(n)) / (gamma * mean);
  }
  return out;
}

Eigen::VectorXd cole_hopf_conditional(double gamma, const Eigen::VectorXd& xi_samples,
                                      const RegressionBasis& basis, const PathEnsemble& states,
                                      int step) {
  if (!(gamma > 0.0)) throw std::invalid_argument("cole_hopf: gamma must be > 0");
  const double shift = gamma * xi_samples.maxCoeff();
  Eigen::MatrixXd targets(xi_samples.size(), 1);
  targets.col(0) = (gamma * xi_samples.array() - shift).exp();
  const RegressionFit fit = fit_least_squares(basis, states, step, targets);
  const Eigen::MatrixXd cond = predict(basis, fit, states, step);
  Eigen::VectorXd out(xi_samples.size());
  for (Eigen::Index p = 0; p < out.size(); ++p) {
    if (!(cond(p, 0) > 0.0))
      throw EvaluationError("cole_hopf_conditional: non-positive conditional mean",
                            "path " + std::to_string(p));
    out[p] = (shift + std::log(cond(p, 0))) / gamma;
  }
  return out;
}

GaussHermiteRule gauss_hermite(int n_nodes) {
  if (n_nodes < 1) throw std::invalid_argument("gauss_hermite: need n_nodes >= 1");
  // Monic Hermite recurrence for weight exp(-x^2/2): p_{k+1} = x p_k - k p_{k-1},
  // so the symmetric Jacobi matrix has zero diagonal and off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  for (int k = 1; k < n_nodes; ++k) {
    const double off = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussHermiteRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;  // first moment of N(0,1) weight is 1
  }
  return rule;
}

double expect_brownian_terminal(const std::function<double(double)>& f, double horizon,
                                int n_nodes) {
  if (horizon < 0.0) throw std::invalid_argument("expect_brownian_terminal: horizon >= 0");
  const GaussHermiteRule rule = gauss_hermite(n_nodes);
  const double s = std::sqrt(horizon);
  double acc = 0.0;
  for (int i = 0; i < n_nodes; ++i) acc += rule.weights[i] * f(s * rule.nodes[i]);
  return acc;
}

}  // namespace bsdelab
