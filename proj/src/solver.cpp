#include "bsdelab/bsde/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bsdelab/core/errors.hpp"
#include "bsdelab/util/parallel.hpp"

namespace bsdelab {

namespace {

double block_max(const Eigen::VectorXd& v) {
  // max is exact in floating point, so a parallel reduction would be safe
  // too; sequential keeps it simple.
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, v[i]);
  return m;
}

void mean_and_sd(const Eigen::VectorXd& v, double& mean, double& sd) {
  const Eigen::Index n = v.size();
  mean = v.sum() / static_cast<double>(n);
  if (n < 2) {
    sd = 0.0;
    return;
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += (v[i] - mean) * (v[i] - mean);
  sd = std::sqrt(acc / static_cast<double>(n - 1));
}

}  // namespace

BsdeSolution solve_bsde(const GeneratorSpec& gen, const Eigen::VectorXd& terminal,
                        const PathEnsemble& brownian, const PathEnsemble* states,
                        const HittingTimes* stop, const SolverConfig& cfg) {
  const int n = brownian.grid.n_steps;
  const int np = brownian.n_paths;
  const int d = brownian.dim;
  if (gen.dim_z != d) throw std::invalid_argument("solve_bsde: generator dim_z != Brownian dim");
  if (terminal.size() != np) throw std::invalid_argument("solve_bsde: terminal size != n_paths");
  if (!terminal.allFinite()) throw std::invalid_argument("solve_bsde: non-finite terminal");
  const PathEnsemble& st = states ? *states : brownian;
  if (st.n_paths != np || st.grid.n_steps != n)
    throw std::invalid_argument("solve_bsde: state ensemble shape mismatch");
  if (stop && stop->step.size() != np)
    throw std::invalid_argument("solve_bsde: stopping field size mismatch");
  if (cfg.picard_max < 1 || !(cfg.picard_tol > 0.0))
    throw std::invalid_argument("solve_bsde: picard_max >= 1 and picard_tol > 0 required");

  const double dt = brownian.grid.dt();
  const double z_clip = cfg.z_clip > 0.0 ? cfg.z_clip : 10.0 / gen.gamma;

  BsdeSolution sol;
  sol.grid = brownian.grid;
  sol.dim_z = d;
  sol.y.setZero(n + 1, np);
  sol.z.setZero(static_cast<Eigen::Index>(std::max(n, 0)) * d, np);
  sol.y.row(n) = terminal.transpose();
  sol.diag.picard_histories.assign(static_cast<std::size_t>(std::max(n, 0)), {});

  if (n == 0) {
    double mean, sd;
    mean_and_sd(terminal, mean, sd);
    sol.y0 = mean;
    sol.y0_std_error = sd / std::sqrt(static_cast<double>(np));
    return sol;
  }

  // Per-path alpha at a step, evaluated on the Brownian history.
  Eigen::VectorXd alpha_vals(np);
  auto fill_alpha = [&](int k) {
    const double t = brownian.grid.points[k];
    parallel_blocks(np, kReductionBlock, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t p = lo; p < hi; ++p)
        alpha_vals[p] = gen.alpha.value(t, brownian.slice(static_cast<int>(p), k));
    });
  };

  Eigen::MatrixXd ty(np, 1), tz(np, d);
  std::int64_t clip_hits = 0, driver_evals = 0;

  // Pathwise Y_0 estimator: u_p = xi_p + sum_k dt g_k(p) - sum_k Zhat_k(p).dB_k(p)
  // over the active steps. The subtracted martingale has zero conditional mean
  // (the integrand is state-measurable), so mean(u) estimates Y_0 with the
  // terminal's sampling noise removed, and sd(u) prices the residual per-path
  // noise honestly (the fitted-surface row 0 hides it in shared coefficients).
  Eigen::VectorXd u = terminal;

  for (int k = n - 1; k >= 0; --k) {
    const double t = brownian.grid.points[k];
    std::vector<char> active(np, 1);
    int n_active = np;
    if (stop) {
      for (int p = 0; p < np; ++p)
        if (!stop->active(p, k)) {
          active[p] = 0;
          --n_active;
        }
    }

    if (n_active == 0) {
      sol.y.row(k) = sol.y.row(k + 1);
      continue;
    }

    // Pass 1: conditional mean of the one-step-ahead value. Inactive rows are
    // zeroed and masked out of the fit (block layout stays fixed); stopped
    // paths carry exact frozen values.
    parallel_blocks(np, kReductionBlock, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t p = lo; p < hi; ++p) {
        const int pi = static_cast<int>(p);
        ty(pi, 0) = active[pi] ? sol.y(k + 1, pi) : 0.0;
      }
    });
    const std::vector<char>* mask = n_active == np ? nullptr : &active;
    const RegressionFit fit_y = fit_least_squares(cfg.basis, st, k, ty, mask);
    const Eigen::MatrixXd cond_y = predict(cfg.basis, fit_y, st, k);

    // Pass 2: z from centered increments. Subtracting the fitted mean (a
    // state function, so the conditional expectation is unchanged) strips the
    // level of Y_{k+1} out of the target, whose variance otherwise grows like
    // t_k/dt and leaks coefficient noise into every path's driver evaluation.
    parallel_blocks(np, kReductionBlock, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t p = lo; p < hi; ++p) {
        const int pi = static_cast<int>(p);
        if (!active[pi]) {
          tz.row(pi).setZero();
          continue;
        }
        const double resid = sol.y(k + 1, pi) - cond_y(pi, 0);
        const auto db = brownian.increment(pi, k);
        for (int c = 0; c < d; ++c) tz(pi, c) = resid * db[c] / dt;
      }
    });
    const RegressionFit fit_z = fit_least_squares(cfg.basis, st, k, tz, mask);
    const Eigen::MatrixXd cond_z = predict(cfg.basis, fit_z, st, k);
    sol.diag.regression_condition = std::max(
        sol.diag.regression_condition, std::max(fit_y.condition, fit_z.condition));

    fill_alpha(k);

    // Clip z inside the driver; store the raw regressed Z.
    auto z_rows = sol.z.middleRows(static_cast<Eigen::Index>(k) * d, d);
    Eigen::VectorXd y_cur(np), m_y(np);
    std::vector<double> history;
    for (int p = 0; p < np; ++p) {
      if (!active[p]) continue;
      for (int c = 0; c < d; ++c) z_rows(c, p) = cond_z(p, c);
    }
    // Driver-side clipped copies.
    Eigen::MatrixXd z_eval = z_rows;
    for (int p = 0; p < np; ++p) {
      if (!active[p]) continue;
      ++driver_evals;
      const double zn = z_eval.col(p).norm();
      if (zn > z_clip) {
        z_eval.col(p) *= z_clip / zn;
        ++clip_hits;
      }
    }

    for (int p = 0; p < np; ++p) m_y[p] = active[p] ? cond_y(p, 0) : 0.0;

    auto eval_driver = [&](int p, double yv) {
      const double g = gen.g(t, yv, z_eval.col(p), alpha_vals[p]);
      if (!std::isfinite(g)) {
        std::ostringstream os;
        os << "(t=" << t << ", y=" << yv << ", |z|=" << z_eval.col(p).norm() << ")";
        throw EvaluationError("driver returned non-finite value", os.str());
      }
      return g;
    };

    if (cfg.scheme == Scheme::ExplicitBackwardEuler) {
      parallel_blocks(np, kReductionBlock, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p) {
          const int pi = static_cast<int>(p);
          if (!active[pi]) continue;
          y_cur[pi] = m_y[pi] + dt * eval_driver(pi, m_y[pi]);
        }
      });
    } else {
      y_cur = m_y;
      Eigen::VectorXd deltas = Eigen::VectorXd::Zero(np);
      for (int it = 0; it < cfg.picard_max; ++it) {
        parallel_blocks(np, kReductionBlock, [&](std::int64_t lo, std::int64_t hi) {
          for (std::int64_t p = lo; p < hi; ++p) {
            const int pi = static_cast<int>(p);
            if (!active[pi]) {
              deltas[pi] = 0.0;
              continue;
            }
            const double y_new = m_y[pi] + dt * eval_driver(pi, y_cur[pi]);
            deltas[pi] = std::abs(y_new - y_cur[pi]);
            y_cur[pi] = y_new;
          }
        });
        history.push_back(block_max(deltas));
        if (history.back() < cfg.picard_tol) break;
      }
      if (history.back() >= cfg.picard_tol)
        throw PicardError("implicit step did not converge within picard_max iterations",
                          history);
      sol.diag.picard_iterations =
          std::max(sol.diag.picard_iterations, static_cast<int>(history.size()));
      sol.diag.picard_residual = std::max(sol.diag.picard_residual, history.back());
    }
    sol.diag.picard_histories[static_cast<std::size_t>(k)] = std::move(history);

    parallel_blocks(np, kReductionBlock, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t p = lo; p < hi; ++p) {
        const int pi = static_cast<int>(p);
        if (!active[pi]) continue;
        const auto db = brownian.increment(pi, k);
        u[pi] += dt * eval_driver(pi, y_cur[pi]) - z_eval.col(pi).dot(db);
      }
    });

    for (int p = 0; p < np; ++p)
      sol.y(k, p) = active[p] ? y_cur[p] : sol.y(k + 1, p);
  }

  sol.diag.clipped_fraction =
      driver_evals > 0 ? static_cast<double>(clip_hits) / static_cast<double>(driver_evals) : 0.0;

  double u_mean, u_sd;
  mean_and_sd(u, u_mean, u_sd);
  sol.y0 = u_mean;
  sol.y0_std_error = u_sd / std::sqrt(static_cast<double>(np));

  if (!sol.y.allFinite() || !sol.z.allFinite())
    throw EvaluationError("solver produced non-finite values", "backward sweep");
  return sol;
}

}  // namespace bsdelab
