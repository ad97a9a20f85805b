#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "bsdelab/core/alpha.hpp"
#include "bsdelab/core/coefficients.hpp"
#include "bsdelab/core/grid.hpp"

namespace bsdelab {

// Column p holds one path; grid point k occupies rows [k*dim, (k+1)*dim).
// A path is therefore contiguous in memory, which is what PathSlice and the
// binary writer rely on.
struct PathEnsemble {
  TimeGrid grid;
  int dim = 0;
  int n_paths = 0;
  Eigen::MatrixXd data;

  static PathEnsemble allocate(TimeGrid grid, int dim, int n_paths);

  Eigen::Map<const Eigen::VectorXd> state(int path, int step) const {
    return Eigen::Map<const Eigen::VectorXd>(
        data.col(path).data() + static_cast<std::ptrdiff_t>(step) * dim, dim);
  }
  Eigen::Map<Eigen::VectorXd> state(int path, int step) {
    return Eigen::Map<Eigen::VectorXd>(
        data.col(path).data() + static_cast<std::ptrdiff_t>(step) * dim, dim);
  }
  Eigen::VectorXd increment(int path, int step) const {
    return state(path, step + 1) - state(path, step);
  }
  // dim x n_paths view of all paths at one grid point.
  auto step_block(int step) const { return data.middleRows(static_cast<Eigen::Index>(step) * dim, dim); }

  PathSlice slice(int path, int upto_step) const {
    return PathSlice{data.col(path).data(), dim, upto_step, grid.t_start, grid.dt()};
  }
};

// Brownian paths started at 0. Increment (path,step) draws component c from
// gaussian_at(seed, path, step, c); identical output for any worker count.
PathEnsemble simulate_brownian(const TimeGrid& grid, int dim, int n_paths, std::uint64_t seed);

// Euler scheme X_{k+1} = X_k + b dt + sigma dB on the increments of an
// existing Brownian ensemble (so X and B stay coupled).
PathEnsemble euler_maruyama(const SdeCoefficients& coeffs, Eigen::Ref<const Eigen::VectorXd> x0,
                            const PathEnsemble& brownian);

// Keep every `factor`-th grid point; n_steps must divide evenly. The result
// of coarsening a Brownian ensemble is again an exact Brownian ensemble.
PathEnsemble coarsen(const PathEnsemble& fine, int factor);

}  // namespace bsdelab
