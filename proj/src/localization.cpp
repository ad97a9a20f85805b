#include "bsdelab/approx/localization.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bsdelab/approx/inf_convolution.hpp"
#include "bsdelab/core/errors.hpp"

namespace bsdelab {

namespace {

// Penalized optimum over (u, v, w) in R^{1+d+m}: opt of
// sign * f(u,v,w) - [ (n/2) phi(2|u-y|) + 2 n lambda (|v|^2 + |w-x0|^2) ],
// with sign +1 for the upper envelope and -1 for the lower one. The probe
// candidates are always evaluated so the returned envelope dominates them.
double penalized_envelope(const std::function<double(double, const Eigen::VectorXd&,
                                                     const Eigen::VectorXd&)>& f,
                          bool upper, int n, const ConvexModulus& phi, double lambda, double y0,
                          const Eigen::VectorXd& x0, int d, int m, double confine_budget,
                          const std::vector<LocalizationProbe>& candidates) {
  const double sign = upper ? 1.0 : -1.0;
  const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(d);
  const auto objective = [&](double u, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    const double penalty =
        0.5 * n * phi(2.0 * std::abs(u - y0)) +
        2.0 * n * lambda * (v.squaredNorm() + (w - x0).squaredNorm());
    return sign * f(u, v, w) - penalty;
  };

  // Confinement radii: beyond them the penalty exceeds the budget that the
  // growth envelope allows the objective to recover.
  const double r_u = std::max(phi.inverse(2.0 * confine_budget / n) / 2.0, 1e-3);
  const double r_vw = std::max(std::sqrt(confine_budget / (n * lambda)), 1e-3);

  double best = -std::numeric_limits<double>::infinity();
  double bu = y0;
  Eigen::VectorXd bv = z0, bw = x0;
  auto consider = [&](double u, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    const double val = objective(u, v, w);
    if (val > best) {
      best = val;
      bu = u;
      bv = v;
      bw = w;
    }
  };

  consider(y0, z0, x0);
  for (const LocalizationProbe& c : candidates) consider(c.y_bar, c.z_bar, c.x_bar);

  int half = 8;
  double hu = r_u / half, hv = r_vw / half;
  double cu = y0;
  Eigen::VectorXd cv = z0, cw = x0;
  for (int round = 0; round <= kMaxRefineRounds; ++round) {
    const double prev = best;
    Eigen::VectorXd v(d), w(m);
    for (int ju = -half; ju <= half; ++ju) {
      const double u = cu + ju * hu;
      // scan v and w jointly via linear index
      const long long side = 2LL * half + 1;
      long long total = 1;
      for (int i = 0; i < d + m; ++i) total *= side;
      for (long long idx = 0; idx < total; ++idx) {
        long long rem = idx;
        for (int i = 0; i < d; ++i) {
          v[i] = cv[i] + (static_cast<int>(rem % side) - half) * hv;
          rem /= side;
        }
        for (int i = 0; i < m; ++i) {
          w[i] = cw[i] + (static_cast<int>(rem % side) - half) * hv;
          rem /= side;
        }
        consider(u, v, w);
      }
    }
    if (round >= kMinRefineRounds && best - prev < kRefineTol) break;
    cu = bu;
    cv = bv;
    cw = bw;
    hu *= 0.5;
    hv *= 0.5;
    half = 4;
  }
  if (!std::isfinite(best))
    throw EvaluationError("penalized envelope is non-finite", "localization lattice");
  return sign * best;
}

}  // namespace

LocalizationReport generator_localization(const GeneratorSpec& gen,
                                          const LocalizationContext& ctx,
                                          const SdeCoefficients& coeffs, int n, double t,
                                          const std::vector<LocalizationProbe>& probes,
                                          double alpha_value) {
  if (n < 1) throw std::invalid_argument("generator_localization: n must be >= 1");
  const int d = gen.dim_z;
  const int m = coeffs.dim_x;
  if (ctx.x.size() != m || ctx.q.size() != m)
    throw std::invalid_argument("generator_localization: anchor dimension mismatch");

  const double alpha_t = alpha_value >= 0.0 ? alpha_value : gen.alpha.value(t);
  const double lambda = ctx.lambda();

  const auto f = [&](double u, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    return gen.g(t, u, v + coeffs.sigma_star_q(t, w, ctx.q), alpha_t);
  };

  LocalizationReport rep;
  rep.n = n;
  rep.alpha_t = alpha_t;
  rep.n_probes = static_cast<int>(probes.size());
  rep.f_anchor = f(ctx.y, Eigen::VectorXd::Zero(d), ctx.x);

  // Envelope constant of |f| from the driver growth bound plus the linear
  // growth of the coefficients: |f| <= alpha_hat + phi(|u|) + lambda(|v|^2 + |w|^2).
  const double alpha_hat = alpha_t + 2.0 * ctx.gamma * ctx.q.squaredNorm() * ctx.nu * ctx.nu;
  const double confine_budget =
      2.0 * (alpha_hat + gen.phi(2.0 * (std::abs(ctx.y) + 1.0)) +
             2.0 * lambda * (ctx.x.norm() + 1.0) * (ctx.x.norm() + 1.0)) +
      2.0 * std::abs(rep.f_anchor) + 2.0;

  rep.psi1 = penalized_envelope(f, true, n, gen.phi, lambda, ctx.y, ctx.x, d, m,
                                confine_budget, probes);
  rep.psi2 = penalized_envelope(f, false, n, gen.phi, lambda, ctx.y, ctx.x, d, m,
                                confine_budget, probes);
  rep.psi = std::abs(rep.psi1 - rep.f_anchor) + std::abs(rep.psi2 - rep.f_anchor);

  const double big_m = 8.0 * ctx.gamma * ctx.q.squaredNorm() * ctx.nu * ctx.nu +
                       2.0 * gen.phi(2.0 * std::abs(ctx.y)) + 6.0 * lambda * ctx.x.squaredNorm();
  rep.psi_cap = 4.0 * alpha_t + big_m;
  rep.psi_bound_ok = rep.psi <= rep.psi_cap + 1e-9;

  rep.worst_slack = std::numeric_limits<double>::infinity();
  const double tol = 1e-9;
  for (const LocalizationProbe& pr : probes) {
    const double lhs = std::abs(f(pr.y_bar, pr.z_bar, pr.x_bar) - rep.f_anchor);
    const double rhs = 0.5 * n * gen.phi(2.0 * std::abs(pr.y_bar - ctx.y)) +
                       2.0 * n * lambda *
                           (pr.z_bar.squaredNorm() + (pr.x_bar - ctx.x).squaredNorm()) +
                       rep.psi;
    const double slack = rhs - lhs;
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      std::ostringstream os;
      os << "(y_bar=" << pr.y_bar << ", |z_bar|=" << pr.z_bar.norm()
         << ", |x_bar - x|=" << (pr.x_bar - ctx.x).norm() << ")";
      rep.worst_probe = os.str();
    }
    if (slack < -tol) rep.inequality_ok = false;
  }
  if (probes.empty()) rep.worst_slack = 0.0;
  return rep;
}

}  // namespace bsdelab
