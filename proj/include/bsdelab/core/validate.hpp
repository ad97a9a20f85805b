#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "bsdelab/core/coefficients.hpp"
#include "bsdelab/core/generator.hpp"

namespace bsdelab {

// Floating-point slack for the validator inequalities. The declared bounds are
// exact inequalities; sampled evaluation gets relative 1e-9 plus absolute
// 1e-12.
inline constexpr double kValidateRelTol = 1e-9;
inline constexpr double kValidateAbsTol = 1e-12;

struct ClauseResult {
  std::string clause;
  bool pass = true;
  double worst_violation = 0.0;  // max over samples of (lhs - rhs); <= 0 passes
  std::string worst_point;
};

struct ValidationReport {
  std::string subject;
  std::vector<ClauseResult> clauses;
  bool pass = true;
};

// Cartesian sample plan for driver validation. Alpha samples are the values
// fed through the generator's alpha channel.
struct GeneratorSamplePlan {
  std::vector<double> ts;
  std::vector<double> ys;
  std::vector<Eigen::VectorXd> zs;
  std::vector<double> alphas;

  static GeneratorSamplePlan default_box(int dim_z, double t_max = 1.0, double y_max = 4.0,
                                         double z_max = 4.0);
  bool empty() const { return ts.empty() || ys.empty() || zs.empty(); }
};

struct CoefficientSamplePlan {
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> xs;  // distinct points; pairs are consecutive entries

  static CoefficientSamplePlan default_box(int dim_x, double t_max = 1.0, double x_max = 4.0);
};

// Checks the declared monotonicity in y and convex growth envelope on every sample.
ValidationReport validate_generator(const GeneratorSpec& gen, const GeneratorSamplePlan& plan);

// Checks the declared Lipschitz and linear growth bounds on every sample.
ValidationReport validate_coefficients(const SdeCoefficients& coeffs,
                                       const CoefficientSamplePlan& plan);

}  // namespace bsdelab
