#pragma once

#include <vector>

namespace bsdelab {

// Uniform discretization of a time window [t_start, t_end].
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  int n_steps = 0;
  std::vector<double> points;  // n_steps + 1 strictly increasing values

  static TimeGrid uniform(double t_start, double t_end, int n_steps);

  double dt() const { return n_steps > 0 ? (t_end - t_start) / n_steps : 0.0; }
  double span() const { return t_end - t_start; }
};

}  // namespace bsdelab
