#include "bsdelab/bsde/regression.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "bsdelab/core/errors.hpp"
#include "bsdelab/util/parallel.hpp"

namespace bsdelab {

namespace {

constexpr double kEigenTruncation = 1e-12;

// Multi-indices of total degree <= degree over `dim` variables, in a fixed
// (graded lexicographic) order so feature layout never depends on context.
std::vector<std::vector<int>> monomial_exponents(int dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(dim, 0);
  for (int total = 0; total <= degree; ++total) {
    // enumerate compositions of `total` into dim parts
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
      if (pos == dim - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
      }
      for (int e = remaining; e >= 0; --e) {
        cur[pos] = e;
        rec(pos + 1, remaining - e);
      }
    };
    if (dim == 0) break;
    rec(0, total);
  }
  return out;
}

}  // namespace

RegressionBasis RegressionBasis::polynomial(int degree) {
  if (degree < 0) throw std::invalid_argument("polynomial basis: degree must be >= 0");
  RegressionBasis b;
  b.kind_ = Kind::Polynomial;
  b.degree_ = degree;
  return b;
}

RegressionBasis RegressionBasis::piecewise_constant(int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo))
    throw std::invalid_argument("piecewise basis: need bins >= 1 and hi > lo");
  RegressionBasis b;
  b.kind_ = Kind::PiecewiseConstant;
  b.bins_ = bins;
  b.lo_ = lo;
  b.hi_ = hi;
  return b;
}

std::string RegressionBasis::name() const {
  return kind_ == Kind::Polynomial ? "polynomial(" + std::to_string(degree_) + ")"
                                   : "piecewise_constant(" + std::to_string(bins_) + ")";
}

int RegressionBasis::n_features(int dim_state) const {
  if (kind_ == Kind::PiecewiseConstant) return bins_;
  // C(dim + degree, degree)
  long long n = 1;
  for (int i = 1; i <= degree_; ++i) n = n * (dim_state + i) / i;
  return static_cast<int>(n);
}

void RegressionBasis::eval(Eigen::Ref<const Eigen::VectorXd> state,
                           Eigen::Ref<Eigen::VectorXd> out) const {
  if (kind_ == Kind::PiecewiseConstant) {
    out.setZero();
    const double w = (hi_ - lo_) / bins_;
    int idx = static_cast<int>(std::floor((state[0] - lo_) / w));
    idx = std::max(0, std::min(bins_ - 1, idx));
    out[idx] = 1.0;
    return;
  }
  static thread_local std::vector<std::vector<int>> cached;
  static thread_local int cached_dim = -1, cached_deg = -1;
  const int dim = static_cast<int>(state.size());
  if (cached_dim != dim || cached_deg != degree_) {
    cached = monomial_exponents(dim, degree_);
    cached_dim = dim;
    cached_deg = degree_;
  }
  for (std::size_t j = 0; j < cached.size(); ++j) {
    double v = 1.0;
    for (int c = 0; c < dim; ++c)
      for (int e = 0; e < cached[j][c]; ++e) v *= state[c];
    out[static_cast<Eigen::Index>(j)] = v;
  }
}

RegressionFit fit_least_squares(const RegressionBasis& basis, const PathEnsemble& states,
                                int step, const Eigen::MatrixXd& targets,
                                const std::vector<char>* mask) {
  const int n = states.n_paths;
  if (targets.rows() != n) throw std::invalid_argument("fit: targets rows != n_paths");
  if (mask && static_cast<int>(mask->size()) != n)
    throw std::invalid_argument("fit: mask size != n_paths");
  const int nt = static_cast<int>(targets.cols());
  const int nf = basis.n_features(states.dim);

  const std::int64_t n_blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<Eigen::MatrixXd> block_a(static_cast<std::size_t>(n_blocks));
  std::vector<Eigen::MatrixXd> block_r(static_cast<std::size_t>(n_blocks));
  parallel_blocks(n, kReductionBlock, [&](std::int64_t lo, std::int64_t hi) {
    const std::size_t blk = static_cast<std::size_t>(lo / kReductionBlock);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nf, nf);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nf, nt);
    Eigen::VectorXd feat(nf);
    for (std::int64_t p = lo; p < hi; ++p) {
      if (mask && !(*mask)[static_cast<std::size_t>(p)]) continue;
      basis.eval(states.state(static_cast<int>(p), step), feat);
      a.selfadjointView<Eigen::Lower>().rankUpdate(feat);
      r.noalias() += feat * targets.row(static_cast<int>(p));
    }
    block_a[blk] = std::move(a);
    block_r[blk] = std::move(r);
  });
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nf, nt);
  for (std::size_t blk = 0; blk < block_a.size(); ++blk) {
    a += block_a[blk];
    r += block_r[blk];
  }
  a.triangularView<Eigen::StrictlyUpper>() = a.transpose();

  if (!a.allFinite() || !r.allFinite())
    throw RegressionError("regression: non-finite normal equations", 0.0);

  int n_used = n;
  if (mask) {
    n_used = 0;
    for (char m : *mask) n_used += m ? 1 : 0;
  }
  if (n_used == 0) throw RegressionError("regression: no rows selected", 0.0);

  // Scale columns to unit RMS before the eigen solve.
  Eigen::VectorXd scale(nf);
  for (int j = 0; j < nf; ++j) {
    const double rms = std::sqrt(a(j, j) / n_used);
    scale[j] = rms > 0.0 ? 1.0 / rms : 1.0;
  }
  const Eigen::MatrixXd a_s = scale.asDiagonal() * a * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_s);
  if (es.info() != Eigen::Success)
    throw RegressionError("regression: eigen decomposition failed", 0.0);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double ev_max = ev[nf - 1];
  if (!(ev_max > 0.0))
    throw RegressionError("regression: normal matrix has no positive spectrum", 0.0);

  RegressionFit fit;
  double ev_min_kept = ev_max;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(nf);
  for (int j = 0; j < nf; ++j) {
    if (ev[j] >= ev_max * kEigenTruncation) {
      inv[j] = 1.0 / ev[j];
      ev_min_kept = std::min(ev_min_kept, ev[j]);
    } else {
      ++fit.dropped;
    }
  }
  fit.condition = ev_max / ev_min_kept;
  fit.coeffs = scale.asDiagonal() *
               (es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() *
                (scale.asDiagonal() * r));
  if (!fit.coeffs.allFinite())
    throw RegressionError("regression: non-finite coefficients", fit.condition);
  return fit;
}

Eigen::MatrixXd predict(const RegressionBasis& basis, const RegressionFit& fit,
                        const PathEnsemble& states, int step) {
  const int n = states.n_paths;
  const int nf = static_cast<int>(fit.coeffs.rows());
  Eigen::MatrixXd out(n, fit.coeffs.cols());
  parallel_blocks(n, kReductionBlock, [&](std::int64_t lo, std::int64_t hi) {
    Eigen::VectorXd feat(nf);
    for (std::int64_t p = lo; p < hi; ++p) {
      basis.eval(states.state(static_cast<int>(p), step), feat);
      out.row(static_cast<int>(p)).noalias() = feat.transpose() * fit.coeffs;
    }
  });
  return out;
}

}  // namespace bsdelab
