#pragma once

#include <Eigen/Core>

#include "bsdelab/sde/paths.hpp"

namespace bsdelab {

// First-exit bookkeeping for tau = inf{ t_k : |X_k| > radius }. step[p] is
// the first grid index whose state lies outside the ball, or n_steps when
// the path never exits (so tau is capped at the horizon).
struct HittingTimes {
  Eigen::VectorXi step;
  double radius = 0.0;
  int n_stopped = 0;

  bool active(int path, int k) const { return k < step[path]; }
};

HittingTimes hitting_time(const PathEnsemble& x, double radius);

// Overwrite every state after the exit index with the exit state, so
// terminal functionals read the stopped path directly.
void freeze_after(PathEnsemble& e, const HittingTimes& times);

}  // namespace bsdelab
