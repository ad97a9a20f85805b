#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "bsdelab/core/alpha.hpp"
#include "bsdelab/core/modulus.hpp"

namespace bsdelab {

// Driver g(t, y, z) with its declared structural parameters. The extra
// `alpha` argument carries the realized value of the alpha process at
// (t, omega); drivers that do not depend on it simply ignore it.
using GeneratorFn =
    std::function<double(double t, double y, Eigen::Ref<const Eigen::VectorXd> z, double alpha)>;

struct GeneratorSpec {
  GeneratorFn g;
  double beta = 0.0;   // one-sided monotonicity constant, >= 0
  double gamma = 1.0;  // quadratic-in-z constant, > 0
  ConvexModulus phi = ConvexModulus::linear(1.0);
  AlphaProcess alpha = AlphaProcess::constant(0.0);
  int dim_z = 1;
  std::string name = "custom";

  GeneratorSpec() = default;
  GeneratorSpec(GeneratorFn fn, double beta_, double gamma_, ConvexModulus phi_,
                AlphaProcess alpha_, int dim_z_, std::string name_);

  double operator()(double t, double y, Eigen::Ref<const Eigen::VectorXd> z, double a) const {
    return g(t, y, z, a);
  }

  // Evaluation with the deterministic alpha value at t; requires alpha
  // of Constant or Deterministic kind.
  double eval_deterministic(double t, double y, Eigen::Ref<const Eigen::VectorXd> z) const {
    return g(t, y, z, alpha.value(t));
  }
};

}  // namespace bsdelab
