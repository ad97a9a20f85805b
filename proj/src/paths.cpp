#include "bsdelab/sde/paths.hpp"

#include <cmath>
#include <stdexcept>

#include "bsdelab/sde/rng.hpp"
#include "bsdelab/sde/stopping.hpp"
#include "bsdelab/util/parallel.hpp"

namespace bsdelab {

PathEnsemble PathEnsemble::allocate(TimeGrid grid, int dim, int n_paths) {
  if (dim < 1 || n_paths < 1) throw std::invalid_argument("ensemble needs dim>=1, n_paths>=1");
  PathEnsemble e;
  e.dim = dim;
  e.n_paths = n_paths;
  e.data.setZero(static_cast<Eigen::Index>(grid.n_steps + 1) * dim, n_paths);
  e.grid = std::move(grid);
  return e;
}

PathEnsemble simulate_brownian(const TimeGrid& grid, int dim, int n_paths, std::uint64_t seed) {
  PathEnsemble e = PathEnsemble::allocate(grid, dim, n_paths);
  const double sdt = std::sqrt(grid.dt());
  parallel_blocks(n_paths, kReductionBlock, [&](int lo, int hi) {
    for (int p = lo; p < hi; ++p) {
      for (int k = 0; k < grid.n_steps; ++k) {
        auto next = e.state(p, k + 1);
        next = e.state(p, k);
        for (int c = 0; c < dim; ++c)
          next[c] += sdt * gaussian_at(seed, static_cast<std::uint64_t>(p),
                                       static_cast<std::uint32_t>(k),
                                       static_cast<std::uint32_t>(c));
      }
    }
  });
  return e;
}

PathEnsemble euler_maruyama(const SdeCoefficients& coeffs, Eigen::Ref<const Eigen::VectorXd> x0,
                            const PathEnsemble& brownian) {
  if (brownian.dim != coeffs.dim_b)
    throw std::invalid_argument("euler_maruyama: Brownian dimension mismatch");
  if (x0.size() != coeffs.dim_x)
    throw std::invalid_argument("euler_maruyama: x0 dimension mismatch");
  PathEnsemble x = PathEnsemble::allocate(brownian.grid, coeffs.dim_x, brownian.n_paths);
  const double dt = brownian.grid.dt();
  parallel_blocks(brownian.n_paths, kReductionBlock, [&](int lo, int hi) {
    Eigen::VectorXd b(coeffs.dim_x);
    Eigen::MatrixXd sigma(coeffs.dim_x, coeffs.dim_b);
    for (int p = lo; p < hi; ++p) {
      x.state(p, 0) = x0;
      for (int k = 0; k < brownian.grid.n_steps; ++k) {
        const double t = brownian.grid.points[k];
        const auto cur = x.state(p, k);
        coeffs.b(t, cur, b);
        coeffs.sigma(t, cur, sigma);
        x.state(p, k + 1) = cur + dt * b + sigma * brownian.increment(p, k);
      }
    }
  });
  return x;
}

PathEnsemble coarsen(const PathEnsemble& fine, int factor) {
  if (factor < 1) throw std::invalid_argument("coarsen: factor must be >= 1");
  if (fine.grid.n_steps % factor != 0)
    throw std::invalid_argument("coarsen: factor must divide n_steps");
  TimeGrid coarse = TimeGrid::uniform(fine.grid.t_start, fine.grid.t_end,
                                      fine.grid.n_steps / factor);
  PathEnsemble e = PathEnsemble::allocate(coarse, fine.dim, fine.n_paths);
  for (int k = 0; k <= coarse.n_steps; ++k)
    e.data.middleRows(static_cast<Eigen::Index>(k) * fine.dim, fine.dim) =
        fine.step_block(k * factor);
  return e;
}

HittingTimes hitting_time(const PathEnsemble& x, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("hitting_time: radius must be > 0");
  HittingTimes ht;
  ht.radius = radius;
  ht.step.setConstant(x.n_paths, x.grid.n_steps);
  for (int p = 0; p < x.n_paths; ++p) {
    // The exit time is strictly positive only if the start lies inside the ball.
    if (x.state(p, 0).norm() >= radius)
      throw std::invalid_argument("hitting_time: initial state outside radius");
    for (int k = 1; k <= x.grid.n_steps; ++k) {
      if (x.state(p, k).norm() > radius) {
        ht.step[p] = k;
        ++ht.n_stopped;
        break;
      }
    }
  }
  return ht;
}

void freeze_after(PathEnsemble& e, const HittingTimes& times) {
  if (times.step.size() != e.n_paths) throw std::invalid_argument("freeze_after: size mismatch");
  for (int p = 0; p < e.n_paths; ++p) {
    const int tau = times.step[p];
    if (tau >= e.grid.n_steps) continue;
    const Eigen::VectorXd frozen = e.state(p, tau);
    for (int k = tau + 1; k <= e.grid.n_steps; ++k) e.state(p, k) = frozen;
  }
}

}  // namespace bsdelab
