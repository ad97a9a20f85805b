#pragma once

#include <string>

#include "bsdelab/core/coefficients.hpp"
#include "bsdelab/core/generator.hpp"

namespace bsdelab {

struct GeneratorParams {
  double beta = 1.0;    // linear_y driver coefficient (may be negative)
  double gamma = 1.0;   // quadratic-in-z constant
  double c = 0.5;       // mixed: weight of the clipped convex term
  double cap = 1.0;     // mixed: clip level M of the convex term
  double alpha0 = 0.5;  // mixed / constant_driver: alpha scale
  double offset = 0.0;  // additive shift applied to the driver
  double horizon = 1.0; // used for integral bounds of alpha
};

// Shipped driver presets: "zero", "linear_y" (g = -beta*y), "pure_quadratic"
// (g = gamma/2 |z|^2), "mixed" (path-dependent alpha, clipped convex term,
// quadratic z term) and "constant_driver" (g = alpha0). All of them pass
// validate_generator with their declared parameters.
GeneratorSpec make_generator(const std::string& preset, const GeneratorParams& params = {},
                             int dim_z = 1);

struct CoefficientParams {
  double b0 = 0.3;    // constant_drift
  double theta = 0.0; // gbm drift rate
  double eta = 0.0;   // gbm volatility
};

// Coefficient presets: "zero" (b=0, sigma=0), "brownian" (b=0, sigma=I),
// "constant_drift" (b=b0*1, sigma=I), "gbm" (b=theta*x, sigma=eta*x, 1-d),
// "sine_drift" (b=sin(x), sigma=I, 1-d).
SdeCoefficients make_coefficients(const std::string& preset, const CoefficientParams& params = {},
                                  int dim_x = 1, int dim_b = 1);

}  // namespace bsdelab
