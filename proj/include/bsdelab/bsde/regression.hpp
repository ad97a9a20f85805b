#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "bsdelab/sde/paths.hpp"

namespace bsdelab {

// Feature map for the conditional-expectation regressions. Polynomial uses
// all monomials of the state up to a total degree; PiecewiseConstant bins
// the first state coordinate over [lo, hi] (bin edges clamp, so every state
// lands somewhere).
class RegressionBasis {
 public:
  enum class Kind { Polynomial, PiecewiseConstant };

  static RegressionBasis polynomial(int degree);
  static RegressionBasis piecewise_constant(int bins, double lo, double hi);

  Kind kind() const { return kind_; }
  int degree() const { return degree_; }
  int bins() const { return bins_; }
  std::string name() const;

  int n_features(int dim_state) const;
  void eval(Eigen::Ref<const Eigen::VectorXd> state, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  Kind kind_ = Kind::Polynomial;
  int degree_ = 3;
  int bins_ = 0;
  double lo_ = 0.0, hi_ = 1.0;
};

struct RegressionFit {
  Eigen::MatrixXd coeffs;  // n_features x n_targets
  double condition = 1.0;  // eigenvalue ratio of the scaled normal matrix
  int dropped = 0;         // eigen-directions truncated as numerically null
};

// Least-squares fit of each target column on the basis evaluated at the
// step-k states. The normal equations are accumulated in fixed 1024-path
// blocks and combined in block order, so the result is bit-stable for any
// worker count. Degenerate designs (e.g. the constant state at the first
// grid point) fall back to the span of the surviving eigen-directions,
// which for a polynomial basis is the plain per-column mean. A non-null
// mask excludes paths with mask[p] == 0 from the fit.
RegressionFit fit_least_squares(const RegressionBasis& basis, const PathEnsemble& states,
                                int step, const Eigen::MatrixXd& targets,
                                const std::vector<char>* mask = nullptr);

// Fitted values at the same step: n_paths x n_targets.
Eigen::MatrixXd predict(const RegressionBasis& basis, const RegressionFit& fit,
                        const PathEnsemble& states, int step);

}  // namespace bsdelab
