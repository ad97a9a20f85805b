#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdelab/core/grid.hpp"

namespace bsdelab {

// One path's Brownian history on grid points 0..last_index.
// Levels are stored contiguously, dim_b doubles per grid point.
struct PathSlice {
  const double* levels = nullptr;
  int dim_b = 0;
  int last_index = 0;
  double base_time = 0.0;
  double dt = 0.0;

  Eigen::Map<const Eigen::VectorXd> level(int k) const {
    return Eigen::Map<const Eigen::VectorXd>(levels + static_cast<std::ptrdiff_t>(k) * dim_b, dim_b);
  }
};

// Non-negative progressively measurable process alpha_t. The path-functional
// form is evaluated on the same Brownian paths as the solver.
class AlphaProcess {
 public:
  enum class Kind { Constant, Deterministic, PathFunctional };
  using Functional = std::function<double(double t, const PathSlice& path)>;

  static AlphaProcess constant(double c);
  // Piecewise-constant in time: values[k] applies on [grid.points[k], grid.points[k+1]).
  static AlphaProcess deterministic(TimeGrid grid, std::vector<double> values);
  static AlphaProcess path_functional(Functional fn, bool bounded,
                                      std::optional<double> sup_bound,
                                      std::optional<double> integral_sup_bound);

  Kind kind() const { return kind_; }
  std::optional<double> sup_bound() const { return sup_bound_; }
  std::optional<double> integral_sup_bound() const { return integral_sup_bound_; }

  // Deterministic-in-omega value; throws for the path-functional kind.
  double value(double t) const;
  // Value on a concrete path; works for every kind.
  double value(double t, const PathSlice& path) const;

  // || int_{t0}^{t1} alpha_r dr ||_inf, when computable from declared bounds.
  std::optional<double> window_integral_sup(double t0, double t1) const;

 private:
  Kind kind_ = Kind::Constant;
  double constant_ = 0.0;
  TimeGrid table_grid_;
  std::vector<double> table_;
  Functional fn_;
  std::optional<double> sup_bound_;
  std::optional<double> integral_sup_bound_;
};

}  // namespace bsdelab
