#include "bsdelab/core/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace bsdelab {

namespace {

AlphaProcess shifted_constant_alpha(double base, double offset) {
  return AlphaProcess::constant(base + std::abs(offset));
}

// Constant driver parts are routed through the alpha argument so the growth
// bound |g| <= a + phi(|y|) + (gamma/2)|z|^2 holds for every probed a, not
// just the realized one: at the process's own level base + |offset| this
// returns base + offset, and |alpha_part| <= a always.
double alpha_part(double a, double offset) {
  return std::max(a - std::abs(offset) + offset, -a);
}

}  // namespace

GeneratorSpec make_generator(const std::string& preset, const GeneratorParams& p, int dim_z) {
  const double off = p.offset;
  if (preset == "zero") {
    return GeneratorSpec(
        [off](double, double, Eigen::Ref<const Eigen::VectorXd>, double a) {
          return alpha_part(a, off);
        },
        0.0, p.gamma, ConvexModulus::linear(1.0), shifted_constant_alpha(0.0, off), dim_z,
        off == 0.0 ? "zero" : "zero+offset");
  }
  if (preset == "linear_y") {
    const double b = p.beta;  // driver coefficient; sign free
    const double slope = std::max(std::abs(b), 1e-3);
    return GeneratorSpec(
        [b, off](double, double y, Eigen::Ref<const Eigen::VectorXd>, double a) {
          return -b * y + alpha_part(a, off);
        },
        std::abs(b), p.gamma, ConvexModulus::linear(slope), shifted_constant_alpha(0.0, off),
        dim_z, "linear_y");
  }
  if (preset == "pure_quadratic") {
    const double gamma = p.gamma;
    return GeneratorSpec(
        [gamma, off](double, double, Eigen::Ref<const Eigen::VectorXd> z, double a) {
          return 0.5 * gamma * z.squaredNorm() + alpha_part(a, off);
        },
        0.0, gamma, ConvexModulus::linear(1.0), shifted_constant_alpha(0.0, off), dim_z,
        "pure_quadratic");
  }
  if (preset == "constant_driver") {
    const double c = p.alpha0;
    if (c < 0.0) throw std::invalid_argument("constant_driver: alpha0 must be >= 0");
    return GeneratorSpec(
        [off](double, double, Eigen::Ref<const Eigen::VectorXd>, double a) {
          return alpha_part(a, off);
        },
        0.0, p.gamma, ConvexModulus::linear(1.0), shifted_constant_alpha(c, off), dim_z,
        "constant_driver");
  }
  if (preset == "mixed") {
    // g = alpha_t(B) - beta*y*1_{y>0} + c*min(|y|^2, cap) + gamma/2 |z|^2.
    // Monotonicity with constant beta needs c*min(y^2,cap) <= beta*y for y>0,
    // i.e. sqrt(cap) <= beta/c; growth is covered by a linear modulus of
    // slope beta + c*sqrt(cap).
    if (p.beta <= 0.0 || p.c < 0.0 || p.cap <= 0.0)
      throw std::invalid_argument("mixed: requires beta > 0, c >= 0, cap > 0");
    if (p.c > 0.0 && std::sqrt(p.cap) > p.beta / p.c + 1e-12)
      throw std::invalid_argument("mixed: monotonicity needs sqrt(cap) <= beta/c");
    const double beta = p.beta, c = p.c, cap = p.cap, gamma = p.gamma;
    const double a0 = p.alpha0, abs_off = std::abs(off);
    auto alpha_fn = [a0, abs_off](double, const PathSlice& path) {
      const double level = path.level(path.last_index).norm();
      return a0 * std::min(1.0, level) + abs_off;
    };
    AlphaProcess alpha = AlphaProcess::path_functional(
        alpha_fn, /*bounded=*/true, /*sup_bound=*/a0 + abs_off,
        /*integral_sup_bound=*/(a0 + abs_off) * p.horizon);
    return GeneratorSpec(
        [beta, c, cap, gamma, off](double, double y, Eigen::Ref<const Eigen::VectorXd> z,
                                   double a) {
          const double convex_part = c * std::min(y * y, cap);
          return alpha_part(a, off) - beta * y * (y > 0.0 ? 1.0 : 0.0) + convex_part +
                 0.5 * gamma * z.squaredNorm();
        },
        beta, gamma, ConvexModulus::linear(beta + c * std::sqrt(cap)), std::move(alpha), dim_z,
        "mixed");
  }
  throw std::invalid_argument("unknown generator preset: " + preset);
}

SdeCoefficients make_coefficients(const std::string& preset, const CoefficientParams& p,
                                  int dim_x, int dim_b) {
  auto identity_sigma = [](double, Eigen::Ref<const Eigen::VectorXd>,
                           Eigen::Ref<Eigen::MatrixXd> out) { out.setIdentity(); };
  const double id_norm = std::sqrt(static_cast<double>(std::min(dim_x, dim_b)));

  if (preset == "zero") {
    return SdeCoefficients(
        [](double, Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::VectorXd> out) {
          out.setZero();
        },
        [](double, Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::MatrixXd> out) {
          out.setZero();
        },
        0.0, 0.0, dim_x, dim_b, "zero");
  }
  if (preset == "brownian") {
    return SdeCoefficients(
        [](double, Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::VectorXd> out) {
          out.setZero();
        },
        identity_sigma, 0.0, id_norm, dim_x, dim_b, "brownian");
  }
  if (preset == "constant_drift") {
    const double b0 = p.b0;
    return SdeCoefficients(
        [b0](double, Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::VectorXd> out) {
          out.setConstant(b0);
        },
        identity_sigma, 0.0, std::abs(b0) * std::sqrt(double(dim_x)) + id_norm, dim_x, dim_b,
        "constant_drift");
  }
  if (preset == "gbm") {
    if (dim_x != 1 || dim_b != 1) throw std::invalid_argument("gbm preset is one-dimensional");
    const double theta = p.theta, eta = p.eta;
    return SdeCoefficients(
        [theta](double, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> out) {
          out[0] = theta * x[0];
        },
        [eta](double, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::MatrixXd> out) {
          out(0, 0) = eta * x[0];
        },
        std::abs(theta) + std::abs(eta), std::abs(theta) + std::abs(eta), 1, 1, "gbm");
  }
  if (preset == "sine_drift") {
    return SdeCoefficients(
        [](double, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> out) {
          out = x.array().sin();
        },
        identity_sigma, 1.0, std::sqrt(double(dim_x)) + id_norm, dim_x, dim_b, "sine_drift");
  }
  throw std::invalid_argument("unknown coefficient preset: " + preset);
}

}  // namespace bsdelab
