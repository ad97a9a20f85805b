#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bsdelab/core/alpha.hpp"
#include "bsdelab/core/coefficients.hpp"
#include "bsdelab/core/errors.hpp"
#include "bsdelab/core/generator.hpp"
#include "bsdelab/core/grid.hpp"
#include "bsdelab/core/modulus.hpp"

namespace bsdelab {

TimeGrid TimeGrid::uniform(double t_start, double t_end, int n_steps) {
  if (n_steps < 0) throw std::invalid_argument("TimeGrid: n_steps must be >= 0");
  if (t_end < t_start) throw std::invalid_argument("TimeGrid: t_end < t_start");
  if (n_steps > 0 && t_end == t_start)
    throw std::invalid_argument("TimeGrid: zero-length grid with positive n_steps");
  TimeGrid g;
  g.t_start = t_start;
  g.t_end = t_end;
  g.n_steps = n_steps;
  g.points.resize(n_steps + 1);
  const double dt = n_steps > 0 ? (t_end - t_start) / n_steps : 0.0;
  for (int k = 0; k <= n_steps; ++k) g.points[k] = t_start + k * dt;
  g.points[n_steps] = t_end;
  return g;
}

// --- ConvexModulus ---------------------------------------------------------

ConvexModulus ConvexModulus::power(double exponent) {
  if (exponent < 1.0) throw std::invalid_argument("ConvexModulus::power: exponent must be >= 1");
  ConvexModulus m;
  m.family_ = Family::Power;
  m.param_ = exponent;
  m.label_ = "power(" + std::to_string(exponent) + ")";
  return m;
}

ConvexModulus ConvexModulus::exp_minus_one(double scale) {
  if (scale <= 0.0) throw std::invalid_argument("ConvexModulus::exp_minus_one: scale must be > 0");
  ConvexModulus m;
  m.family_ = Family::ExpMinusOne;
  m.param_ = scale;
  m.label_ = "exp_minus_one(" + std::to_string(scale) + ")";
  return m;
}

ConvexModulus ConvexModulus::linear(double slope) {
  if (slope <= 0.0) throw std::invalid_argument("ConvexModulus::linear: slope must be > 0");
  ConvexModulus m;
  m.family_ = Family::Linear;
  m.param_ = slope;
  m.label_ = "linear(" + std::to_string(slope) + ")";
  return m;
}

ConvexModulus ConvexModulus::custom(std::function<double(double)> fn, std::string label) {
  ConvexModulus m;
  m.family_ = Family::Custom;
  m.fn_ = std::move(fn);
  m.label_ = std::move(label);
  // Load-time self-check: phi(0)=0, strict monotonicity and midpoint
  // convexity on sampled points.
  if (std::abs(m.fn_(0.0)) > 1e-12)
    throw std::invalid_argument("ConvexModulus::custom: phi(0) != 0");
  double prev = 0.0;
  for (int i = 1; i <= 64; ++i) {
    const double r = 0.125 * i;
    const double v = m.fn_(r);
    if (!(v > prev)) throw std::invalid_argument("ConvexModulus::custom: not strictly increasing");
    prev = v;
  }
  for (int i = 0; i < 32; ++i) {
    const double r = 0.25 * i, s = 0.25 * i + 2.0;
    const double mid = m.fn_(0.5 * (r + s));
    const double chord = 0.5 * (m.fn_(r) + m.fn_(s));
    if (mid > chord * (1.0 + 1e-9) + 1e-12)
      throw std::invalid_argument("ConvexModulus::custom: midpoint convexity violated");
  }
  return m;
}

double ConvexModulus::eval_raw(double r) const {
  switch (family_) {
    case Family::Power:
      return std::pow(r, param_);
    case Family::ExpMinusOne:
      return std::expm1(param_ * r);
    case Family::Linear:
      return param_ * r;
    case Family::Custom:
      return fn_(r);
  }
  return 0.0;
}

double ConvexModulus::operator()(double r) const {
  if (r < 0.0) throw std::domain_error("ConvexModulus: negative argument");
  return eval_raw(r);
}

double ConvexModulus::inverse(double v) const {
  if (v < 0.0) throw std::domain_error("ConvexModulus::inverse: negative value");
  if (v == 0.0) return 0.0;
  switch (family_) {
    case Family::Power:
      return std::pow(v, 1.0 / param_);
    case Family::ExpMinusOne:
      return std::log1p(v) / param_;
    case Family::Linear:
      return v / param_;
    case Family::Custom:
      break;
  }
  // Bisection; phi is strictly increasing with phi(0)=0.
  double hi = 1.0;
  while (eval_raw(hi) < v) {
    hi *= 2.0;
    if (hi > 1e30) throw std::domain_error("ConvexModulus::inverse: value out of range");
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (eval_raw(mid) < v)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

// --- AlphaProcess ----------------------------------------------------------

AlphaProcess AlphaProcess::constant(double c) {
  if (c < 0.0) throw std::invalid_argument("AlphaProcess::constant: negative value");
  AlphaProcess a;
  a.kind_ = Kind::Constant;
  a.constant_ = c;
  a.sup_bound_ = c;
  a.integral_sup_bound_ = std::nullopt;  // horizon-dependent; via window_integral_sup
  return a;
}

AlphaProcess AlphaProcess::deterministic(TimeGrid grid, std::vector<double> values) {
  if (values.size() != static_cast<std::size_t>(grid.n_steps))
    throw std::invalid_argument("AlphaProcess::deterministic: one value per grid step expected");
  for (double v : values)
    if (v < 0.0) throw std::invalid_argument("AlphaProcess::deterministic: negative value");
  AlphaProcess a;
  a.kind_ = Kind::Deterministic;
  a.table_grid_ = std::move(grid);
  a.table_ = std::move(values);
  a.sup_bound_ = a.table_.empty() ? 0.0 : *std::max_element(a.table_.begin(), a.table_.end());
  return a;
}

AlphaProcess AlphaProcess::path_functional(Functional fn, bool bounded,
                                           std::optional<double> sup_bound,
                                           std::optional<double> integral_sup_bound) {
  if (bounded && !sup_bound)
    throw std::invalid_argument("AlphaProcess::path_functional: bounded flag without sup_bound");
  AlphaProcess a;
  a.kind_ = Kind::PathFunctional;
  a.fn_ = std::move(fn);
  a.sup_bound_ = sup_bound;
  a.integral_sup_bound_ = integral_sup_bound;
  return a;
}

double AlphaProcess::value(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::Deterministic: {
      if (table_.empty()) return 0.0;
      if (t <= table_grid_.t_start) return table_.front();
      if (t >= table_grid_.t_end) return table_.back();
      const double dt = table_grid_.dt();
      const int k = std::min<int>(static_cast<int>((t - table_grid_.t_start) / dt),
                                  static_cast<int>(table_.size()) - 1);
      return table_[k];
    }
    case Kind::PathFunctional:
      throw std::logic_error("AlphaProcess::value(t): path-functional alpha needs a path");
  }
  return 0.0;
}

double AlphaProcess::value(double t, const PathSlice& path) const {
  if (kind_ == Kind::PathFunctional) return fn_(t, path);
  return value(t);
}

std::optional<double> AlphaProcess::window_integral_sup(double t0, double t1) const {
  if (t1 < t0) return std::nullopt;
  switch (kind_) {
    case Kind::Constant:
      return constant_ * (t1 - t0);
    case Kind::Deterministic: {
      // alpha is piecewise constant and deterministic; the sup is the integral.
      double acc = 0.0;
      const double dt = table_grid_.dt();
      for (std::size_t k = 0; k < table_.size(); ++k) {
        const double a = table_grid_.points[k], b = table_grid_.points[k + 1];
        const double lo = std::max(a, t0), hi = std::min(b, t1);
        if (hi > lo) acc += table_[k] * (hi - lo);
      }
      (void)dt;
      return acc;
    }
    case Kind::PathFunctional:
      if (sup_bound_) return *sup_bound_ * (t1 - t0);
      return integral_sup_bound_;  // whole-horizon fallback
  }
  return std::nullopt;
}

// --- GeneratorSpec / SdeCoefficients ---------------------------------------

GeneratorSpec::GeneratorSpec(GeneratorFn fn, double beta_, double gamma_, ConvexModulus phi_,
                             AlphaProcess alpha_, int dim_z_, std::string name_)
    : g(std::move(fn)),
      beta(beta_),
      gamma(gamma_),
      phi(std::move(phi_)),
      alpha(std::move(alpha_)),
      dim_z(dim_z_),
      name(std::move(name_)) {
  if (beta < 0.0) throw std::invalid_argument("GeneratorSpec: beta must be >= 0");
  if (gamma <= 0.0) throw std::invalid_argument("GeneratorSpec: gamma must be > 0");
  if (dim_z < 1) throw std::invalid_argument("GeneratorSpec: dim_z must be >= 1");
}

SdeCoefficients::SdeCoefficients(DriftFn b_, DiffusionFn sigma_, double mu_, double nu_,
                                 int dim_x_, int dim_b_, std::string name_)
    : b(std::move(b_)),
      sigma(std::move(sigma_)),
      mu(mu_),
      nu(nu_),
      dim_x(dim_x_),
      dim_b(dim_b_),
      name(std::move(name_)) {
  if (mu < 0.0 || nu < 0.0) throw std::invalid_argument("SdeCoefficients: mu, nu must be >= 0");
  if (dim_x < 1 || dim_b < 1) throw std::invalid_argument("SdeCoefficients: dimensions must be >= 1");
}

}  // namespace bsdelab
