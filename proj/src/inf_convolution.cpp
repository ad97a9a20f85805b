#include "bsdelab/approx/inf_convolution.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bsdelab/core/errors.hpp"

namespace bsdelab {

namespace {

struct LatticeMin {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd arg;
};

// Scan the axis-aligned lattice {center + j*h : |j_i| <= m} plus the given
// extra candidates; ties keep the first point in scan order.
LatticeMin scan_lattice(const std::function<double(const Eigen::VectorXd&)>& objective,
                        const Eigen::VectorXd& center, double h, int m,
                        const std::vector<Eigen::VectorXd>& extra) {
  const int dim = static_cast<int>(center.size());
  LatticeMin best;
  for (const Eigen::VectorXd& u : extra) {
    const double v = objective(u);
    if (v < best.value) {
      best.value = v;
      best.arg = u;
    }
  }
  const long long side = 2LL * m + 1;
  long long total = 1;
  for (int i = 0; i < dim; ++i) total *= side;
  Eigen::VectorXd u(dim);
  for (long long idx = 0; idx < total; ++idx) {
    long long rem = idx;
    for (int i = 0; i < dim; ++i) {
      const int j = static_cast<int>(rem % side) - m;
      rem /= side;
      u[i] = center[i] + j * h;
    }
    const double v = objective(u);
    if (v < best.value) {
      best.value = v;
      best.arg = u;
    }
  }
  if (!std::isfinite(best.value))
    throw EvaluationError("lattice objective returned non-finite values", "lattice scan");
  return best;
}

}  // namespace

double default_search_radius(const InfConvSpec& spec, int n, double x_norm) {
  if (n <= 1 || spec.K <= 0.0) return x_norm + 10.0;
  // Beyond this radius the penalty alone exceeds anything the growth
  // envelope lets f recover, so minimizers live inside it.
  const double budget =
      (2.0 * spec.a + spec.K * spec.phi(2.0 * x_norm) + 2.0 / n) * 2.0 / ((n - 1) * spec.K);
  return x_norm + spec.phi.inverse(budget) / 2.0;
}

double inf_convolution(const InfConvSpec& spec, int n, Eigen::Ref<const Eigen::VectorXd> x) {
  if (n < 1) throw std::invalid_argument("inf_convolution: n must be >= 1");
  if (x.size() != spec.dim) throw std::invalid_argument("inf_convolution: dimension mismatch");
  const double x_norm = x.norm();
  const double radius =
      spec.search_radius > 0.0 ? spec.search_radius : default_search_radius(spec, n, x_norm);
  double h = spec.search_spacing > 0.0 ? spec.search_spacing : radius / 16.0;
  const int m0 = std::max(1, static_cast<int>(std::floor(radius / h + 1e-9)));

  const auto objective = [&](const Eigen::VectorXd& u) {
    return spec.f(u) + 0.5 * n * spec.K * spec.phi(2.0 * (u - x).norm());
  };

  // Growth-envelope check on the first-round lattice.
  {
    const long long side = 2LL * m0 + 1;
    long long total = 1;
    for (int i = 0; i < spec.dim; ++i) total *= side;
    Eigen::VectorXd u(spec.dim);
    for (long long idx = 0; idx < total; ++idx) {
      long long rem = idx;
      for (int i = 0; i < spec.dim; ++i) {
        const int j = static_cast<int>(rem % side) - m0;
        rem /= side;
        u[i] = x[i] + j * h;
      }
      const double fu = spec.f(u);
      const double envelope = spec.a + spec.K * spec.phi(u.norm());
      if (!(std::abs(fu) <= envelope + 1e-9 * (1.0 + envelope))) {
        std::ostringstream os;
        os << spec.name << ": |f(u)|=" << std::abs(fu) << " > a+K*phi(|u|)=" << envelope
           << " at |u|=" << u.norm();
        throw std::invalid_argument("inf_convolution growth check failed: " + os.str());
      }
    }
  }

  std::vector<Eigen::VectorXd> extra = {Eigen::VectorXd(x)};
  LatticeMin best = scan_lattice(objective, x, h, m0, extra);
  for (int round = 0; round < kMaxRefineRounds; ++round) {
    h *= 0.5;
    const LatticeMin refined = scan_lattice(objective, best.arg, h, 4, extra);
    const double change = best.value - refined.value;
    if (refined.value < best.value) best = refined;
    if (round + 1 >= kMinRefineRounds && change < kRefineTol) return best.value;
  }
  throw RefinementError("inf_convolution: refinement did not settle within " +
                        std::to_string(kMaxRefineRounds) + " rounds");
}

SequenceReport approx_sequence_check(const InfConvSpec& spec,
                                     const std::vector<Eigen::VectorXd>& x_grid,
                                     const std::vector<int>& n_schedule) {
  if (n_schedule.empty() || x_grid.empty())
    throw std::invalid_argument("approx_sequence_check: empty grid or schedule");
  for (std::size_t i = 1; i < n_schedule.size(); ++i)
    if (n_schedule[i] <= n_schedule[i - 1])
      throw std::invalid_argument("approx_sequence_check: n_schedule must increase");

  SequenceReport report;
  const double tol = kRefineTol;
  for (const Eigen::VectorXd& x : x_grid) {
    const double fx = spec.f(x);
    const double envelope = spec.a + 0.5 * spec.K * spec.phi(2.0 * x.norm());
    double prev_value = -std::numeric_limits<double>::infinity();
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int n : n_schedule) {
      SequencePoint pt;
      pt.x_coord = x[0];
      pt.n = n;
      pt.value = inf_convolution(spec, n, x);
      pt.envelope = envelope;
      pt.gap = fx - pt.value;
      report.points.push_back(pt);

      auto flag = [&](bool& ok, double violation, const char* what) {
        if (violation > tol) {
          ok = false;
          if (violation > report.worst_violation) {
            report.worst_violation = violation;
            std::ostringstream os;
            os << what << " at x=" << x.transpose() << ", n=" << n;
            report.worst_point = os.str();
          }
        }
      };
      flag(report.bound_ok, std::abs(pt.value) - envelope, "envelope bound");
      flag(report.monotone_ok, prev_value - pt.value, "monotonicity");
      flag(report.gap_shrinks, pt.gap - prev_gap, "gap decrease");
      prev_value = pt.value;
      prev_gap = pt.gap;
    }
  }
  return report;
}

}  // namespace bsdelab
