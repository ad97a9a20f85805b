#include "bsdelab/bsde/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bsdelab {

namespace {

BoundReport finish(BoundReport r, double slack) {
  r.margin = r.bound - r.observed;
  r.pass = r.observed <= r.bound * (1.0 + slack) + 1e-9;
  return r;
}

}  // namespace

BoundReport check_bound_global(const BsdeSolution& sol, const GeneratorSpec& gen,
                               const Eigen::VectorXd& terminal, double slack) {
  BoundReport r;
  const double span = sol.grid.span();
  const auto integral = gen.alpha.window_integral_sup(sol.grid.t_start, sol.grid.t_end);
  if (!integral) {
    r.applicable = false;
    r.detail = "alpha process declares no integral bound";
    return r;
  }
  const double xi_sup = terminal.cwiseAbs().maxCoeff();
  r.bound = std::exp(gen.beta * span) * (xi_sup + *integral);
  r.observed = sol.y.cwiseAbs().maxCoeff();
  std::ostringstream os;
  os << "exp(beta*T)*(|xi|_sup + int_alpha) with |xi|_sup=" << xi_sup
     << ", int_alpha=" << *integral;
  r.detail = os.str();
  return finish(r, slack);
}

BoundReport check_bound_small_horizon(const BsdeSolution& sol, const GeneratorSpec& gen,
                                      double slack) {
  BoundReport r;
  const double eps = sol.grid.span();
  const double terminal_max = sol.y.row(sol.grid.n_steps).cwiseAbs().maxCoeff();
  if (terminal_max > 1e-12)
    throw std::invalid_argument("check_bound_small_horizon: terminal value must be 0");

  const double grow = std::exp(gen.beta * eps);
  double best = std::numeric_limits<double>::infinity();
  std::string which;
  if (gen.alpha.sup_bound()) {
    best = eps * grow * *gen.alpha.sup_bound();
    which = "eps*exp(beta*eps)*sup_alpha";
  }
  if (const auto integral = gen.alpha.window_integral_sup(sol.grid.t_start, sol.grid.t_end)) {
    const double b2 = grow * *integral;
    if (b2 < best) {
      best = b2;
      which = "exp(beta*eps)*int_alpha";
    }
  }
  if (!std::isfinite(best)) {
    r.applicable = false;
    r.detail = "alpha process declares no sup or integral bound";
    return r;
  }
  r.bound = best;
  r.observed = sol.y.cwiseAbs().maxCoeff();
  r.detail = which;
  return finish(r, slack);
}

}  // namespace bsdelab
