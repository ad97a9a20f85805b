#pragma once

#include <functional>
#include <string>

namespace bsdelab {

// Strictly increasing convex function phi on [0, inf) with phi(0) = 0.
// Three parametric families plus a user-supplied form; the latter is
// accepted only after a sampled convexity/monotonicity self-check.
class ConvexModulus {
 public:
  enum class Family { Power, ExpMinusOne, Linear, Custom };

  static ConvexModulus power(double exponent);         // r^b, b >= 1
  static ConvexModulus exp_minus_one(double scale);    // exp(scale*r) - 1
  static ConvexModulus linear(double slope);           // slope * r
  static ConvexModulus custom(std::function<double(double)> fn, std::string label);

  // Throws std::domain_error for r < 0.
  double operator()(double r) const;

  // phi^{-1}(v) for v >= 0; closed form for the parametric families,
  // bisection otherwise.
  double inverse(double v) const;

  Family family() const { return family_; }
  double parameter() const { return param_; }
  const std::string& label() const { return label_; }

 private:
  ConvexModulus() = default;
  double eval_raw(double r) const;

  Family family_ = Family::Linear;
  double param_ = 1.0;
  std::function<double(double)> fn_;
  std::string label_ = "linear(1)";
};

}  // namespace bsdelab
