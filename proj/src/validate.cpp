#include "bsdelab/core/validate.hpp"

#include <cmath>
#include <sstream>

#include "bsdelab/core/errors.hpp"

namespace bsdelab {

namespace {

std::string point_str(double t, double y, const Eigen::VectorXd& z, double a) {
  std::ostringstream os;
  os << "(t=" << t << ", y=" << y << ", z=[";
  for (int i = 0; i < z.size(); ++i) os << (i ? "," : "") << z[i];
  os << "], alpha=" << a << ")";
  return os.str();
}

std::string point_str(double t, const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(t=" << t << ", x=[";
  for (int i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << "])";
  return os.str();
}

double checked_eval(const GeneratorSpec& gen, double t, double y, const Eigen::VectorXd& z,
                    double a) {
  double v;
  try {
    v = gen(t, y, z, a);
  } catch (const std::exception& e) {
    throw EvaluationError(std::string("generator evaluation failed: ") + e.what(),
                          point_str(t, y, z, a));
  }
  if (!std::isfinite(v))
    throw EvaluationError("generator returned a non-finite value", point_str(t, y, z, a));
  return v;
}

// Tracks the worst (lhs - rhs) margin; positive beyond slack fails.
struct ClauseTracker {
  ClauseResult result;
  explicit ClauseTracker(std::string name) { result.clause = std::move(name); }
  void observe(double lhs, double rhs, const std::string& point) {
    const double slack = kValidateRelTol * std::abs(rhs) + kValidateAbsTol;
    const double violation = lhs - rhs;
    if (violation > result.worst_violation || result.worst_point.empty()) {
      result.worst_violation = violation;
      result.worst_point = point;
    }
    if (violation > slack) result.pass = false;
  }
};

}  // namespace

GeneratorSamplePlan GeneratorSamplePlan::default_box(int dim_z, double t_max, double y_max,
                                                     double z_max) {
  GeneratorSamplePlan p;
  p.ts = {0.0, 0.25 * t_max, 0.5 * t_max, t_max};
  for (int i = -8; i <= 8; ++i) p.ys.push_back(y_max * i / 8.0);
  p.zs.emplace_back(Eigen::VectorXd::Zero(dim_z));
  for (int axis = 0; axis < dim_z; ++axis)
    for (double m : {0.5, 1.0, 2.0, 4.0}) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(dim_z);
      z[axis] = m * z_max / 4.0;
      p.zs.push_back(z);
      p.zs.push_back(-z);
    }
  if (dim_z > 1) p.zs.emplace_back(Eigen::VectorXd::Constant(dim_z, z_max / std::sqrt(double(dim_z))));
  p.alphas = {0.0, 0.25, 1.0};
  return p;
}

CoefficientSamplePlan CoefficientSamplePlan::default_box(int dim_x, double t_max, double x_max) {
  CoefficientSamplePlan p;
  p.ts = {0.0, 0.5 * t_max, t_max};
  for (int i = -6; i <= 6; ++i)
    p.xs.emplace_back(Eigen::VectorXd::Constant(dim_x, x_max * i / 6.0));
  for (int axis = 0; axis < dim_x && dim_x > 1; ++axis) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim_x);
    x[axis] = x_max;
    p.xs.push_back(x);
  }
  return p;
}

ValidationReport validate_generator(const GeneratorSpec& gen, const GeneratorSamplePlan& plan) {
  if (plan.empty()) throw std::invalid_argument("validate_generator: empty sample plan");
  ValidationReport report;
  report.subject = gen.name;

  ClauseTracker mono("monotonicity in y");
  ClauseTracker growth("convex growth envelope");

  for (double t : plan.ts)
    for (double a : plan.alphas)
      for (const auto& z : plan.zs) {
        const double g0 = checked_eval(gen, t, 0.0, z, a);
        for (double y : plan.ys) {
          const double gy = checked_eval(gen, t, y, z, a);
          const std::string pt = point_str(t, y, z, a);
          mono.observe(y * (gy - g0), gen.beta * y * y, pt);
          growth.observe(std::abs(gy),
                         a + gen.phi(std::abs(y)) + 0.5 * gen.gamma * z.squaredNorm(), pt);
        }
      }

  report.clauses = {mono.result, growth.result};
  report.pass = mono.result.pass && growth.result.pass;
  return report;
}

ValidationReport validate_coefficients(const SdeCoefficients& coeffs,
                                       const CoefficientSamplePlan& plan) {
  if (plan.ts.empty() || plan.xs.size() < 2)
    throw std::invalid_argument("validate_coefficients: need at least two sample points");
  ValidationReport report;
  report.subject = coeffs.name;

  ClauseTracker lipschitz("Lipschitz in x");
  ClauseTracker growth("linear growth in x");

  auto eval = [&](double t, const Eigen::VectorXd& x, Eigen::VectorXd& bv, Eigen::MatrixXd& sv) {
    try {
      coeffs.b(t, x, bv);
      coeffs.sigma(t, x, sv);
    } catch (const std::exception& e) {
      throw EvaluationError(std::string("coefficient evaluation failed: ") + e.what(),
                            point_str(t, x));
    }
    if (!bv.allFinite() || !sv.allFinite())
      throw EvaluationError("coefficient returned a non-finite value", point_str(t, x));
  };

  Eigen::VectorXd b1(coeffs.dim_x), b2(coeffs.dim_x);
  Eigen::MatrixXd s1(coeffs.dim_x, coeffs.dim_b), s2(coeffs.dim_x, coeffs.dim_b);
  for (double t : plan.ts) {
    for (std::size_t i = 0; i < plan.xs.size(); ++i) {
      eval(t, plan.xs[i], b1, s1);
      growth.observe(b1.norm() + s1.norm(), coeffs.nu * (1.0 + plan.xs[i].norm()),
                     point_str(t, plan.xs[i]));
      for (std::size_t j = i + 1; j < plan.xs.size(); ++j) {
        const double dist = (plan.xs[i] - plan.xs[j]).norm();
        if (dist == 0.0) continue;
        eval(t, plan.xs[j], b2, s2);
        lipschitz.observe((b1 - b2).norm() + (s1 - s2).norm(), coeffs.mu * dist,
                          point_str(t, plan.xs[i]) + " vs " + point_str(t, plan.xs[j]));
      }
    }
  }

  report.clauses = {lipschitz.result, growth.result};
  report.pass = lipschitz.result.pass && growth.result.pass;
  return report;
}

}  // namespace bsdelab
