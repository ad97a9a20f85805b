#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "bsdelab/core/modulus.hpp"

namespace bsdelab {

inline constexpr double kRefineTol = 1e-8;
// A coarse lattice can pin the argmin to the same point for several rounds
// (zero change without convergence), so the spacing is halved at least
// kMinRefineRounds times before the change criterion may stop the search.
inline constexpr int kMinRefineRounds = 12;
inline constexpr int kMaxRefineRounds = 40;

// Target of the penalized-infimum approximation: a continuous f with the
// declared growth envelope |f(x)| <= a + K*phi(|x|).
struct InfConvSpec {
  std::function<double(Eigen::Ref<const Eigen::VectorXd>)> f;
  int dim = 1;
  double a = 0.0;
  double K = 1.0;
  ConvexModulus phi = ConvexModulus::linear(1.0);
  double search_radius = 0.0;   // 0 = derive from the growth envelope per n
  double search_spacing = 0.0;  // 0 = radius / 16
  std::string name = "custom";
};

// Confinement radius for minimizers of f(u) + (n/2) K phi(2|u-x|): points
// beyond it cannot beat the value at u = x given the growth envelope.
double default_search_radius(const InfConvSpec& spec, int n, double x_norm);

// f_n(x) = min over a refined lattice of f(u) + (n/2) K phi(2|u-x|).
// Refinement halves the spacing around the current argmin (at least
// kMinRefineRounds times) until two rounds agree within kRefineTol; more
// than kMaxRefineRounds rounds throws.
double inf_convolution(const InfConvSpec& spec, int n, Eigen::Ref<const Eigen::VectorXd> x);

struct SequencePoint {
  double x_coord = 0.0;  // first coordinate of the grid point (reports)
  int n = 0;
  double value = 0.0;
  double envelope = 0.0;  // a + K/2 phi(2|x|)
  double gap = 0.0;       // f(x) - f_n(x), >= 0 up to tolerance
};

struct SequenceReport {
  std::vector<SequencePoint> points;
  bool bound_ok = true;      // |f_n| within the envelope everywhere
  bool monotone_ok = true;   // f_{n+1} >= f_n - tol
  bool gap_shrinks = true;   // gap non-increasing in n per grid point
  double worst_violation = 0.0;
  std::string worst_point;
};

// Evaluates f_n over x_grid for each n and checks the three approximation
// clauses: the envelope bound, monotonicity in n, and gap decrease.
SequenceReport approx_sequence_check(const InfConvSpec& spec,
                                     const std::vector<Eigen::VectorXd>& x_grid,
                                     const std::vector<int>& n_schedule);

}  // namespace bsdelab
