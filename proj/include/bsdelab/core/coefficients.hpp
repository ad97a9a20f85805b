#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

namespace bsdelab {

// Forward SDE coefficients b: [0,T] x R^m -> R^m and sigma: [0,T] x R^m -> R^{m x d},
// with declared Lipschitz constant mu and linear-growth constant nu.
struct SdeCoefficients {
  using DriftFn =
      std::function<void(double t, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> out)>;
  using DiffusionFn =
      std::function<void(double t, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::MatrixXd> out)>;

  DriftFn b;
  DiffusionFn sigma;
  double mu = 0.0;
  double nu = 0.0;
  int dim_x = 1;  // m
  int dim_b = 1;  // d
  std::string name = "custom";

  SdeCoefficients() = default;
  SdeCoefficients(DriftFn b_, DiffusionFn sigma_, double mu_, double nu_, int dim_x_, int dim_b_,
                  std::string name_);

  Eigen::VectorXd drift(double t, Eigen::Ref<const Eigen::VectorXd> x) const {
    Eigen::VectorXd out(dim_x);
    b(t, x, out);
    return out;
  }
  Eigen::MatrixXd diffusion(double t, Eigen::Ref<const Eigen::VectorXd> x) const {
    Eigen::MatrixXd out(dim_x, dim_b);
    sigma(t, x, out);
    return out;
  }
  // sigma^*(t,x) q, the d-vector the representation target is evaluated at.
  Eigen::VectorXd sigma_star_q(double t, Eigen::Ref<const Eigen::VectorXd> x,
                               Eigen::Ref<const Eigen::VectorXd> q) const {
    return diffusion(t, x).transpose() * q;
  }
};

}  // namespace bsdelab
