#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "bsdelab/core/alpha.hpp"
#include "bsdelab/core/errors.hpp"
#include "bsdelab/core/grid.hpp"
#include "bsdelab/core/modulus.hpp"
#include "bsdelab/core/presets.hpp"
#include "bsdelab/core/validate.hpp"

using namespace bsdelab;

namespace {
Eigen::VectorXd v1(double z) {
  Eigen::VectorXd v(1);
  v[0] = z;
  return v;
}
}  // namespace

TEST_CASE("uniform grid endpoints and spacing") {
  const TimeGrid g = TimeGrid::uniform(0.25, 1.25, 8);
  CHECK(g.points.size() == 9);
  CHECK(g.points.front() == doctest::Approx(0.25));
  CHECK(g.points.back() == doctest::Approx(1.25));
  CHECK(g.dt() == doctest::Approx(0.125));
  CHECK(g.span() == doctest::Approx(1.0));
  for (int k = 0; k < 8; ++k)
    CHECK(g.points[k + 1] - g.points[k] == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("degenerate grid") {
  const TimeGrid g = TimeGrid::uniform(0.5, 0.5, 0);
  CHECK(g.points.size() == 1);
  CHECK(g.dt() == 0.0);
}

TEST_CASE("modulus families evaluate in closed form") {
  const ConvexModulus p2 = ConvexModulus::power(2.0);
  CHECK(p2(3.0) == doctest::Approx(9.0));
  CHECK(p2(0.0) == doctest::Approx(0.0));
  CHECK(p2.inverse(9.0) == doctest::Approx(3.0));

  const ConvexModulus lin = ConvexModulus::linear(2.5);
  CHECK(lin(4.0) == doctest::Approx(10.0));
  CHECK(lin.inverse(10.0) == doctest::Approx(4.0));

  const ConvexModulus ex = ConvexModulus::exp_minus_one(2.0);
  CHECK(ex(1.0) == doctest::Approx(std::exp(2.0) - 1.0));
  CHECK(ex.inverse(ex(0.7)) == doctest::Approx(0.7));
}

TEST_CASE("modulus rejects negative arguments") {
  const ConvexModulus p2 = ConvexModulus::power(2.0);
  CHECK_THROWS_AS(p2(-0.1), std::domain_error);
}

TEST_CASE("custom modulus is self-checked") {
  // sqrt is concave, so the sampled convexity check must refuse it
  CHECK_THROWS_AS(ConvexModulus::custom([](double r) { return std::sqrt(r); }, "sqrt"),
                  std::invalid_argument);
  const ConvexModulus ok = ConvexModulus::custom([](double r) { return r * r + r; }, "r2+r");
  CHECK(ok(2.0) == doctest::Approx(6.0));
  CHECK(ok.inverse(6.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("alpha process kinds") {
  const AlphaProcess c = AlphaProcess::constant(0.75);
  CHECK(c.value(0.3) == doctest::Approx(0.75));
  CHECK(c.sup_bound().value() == doctest::Approx(0.75));
  CHECK(c.window_integral_sup(0.0, 2.0).value() == doctest::Approx(1.5));

  // One value per step, held constant on [t_k, t_{k+1}).
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 4);
  const AlphaProcess d = AlphaProcess::deterministic(grid, {1.0, 2.0, 3.0, 4.0});
  CHECK(d.value(0.0) == doctest::Approx(1.0));
  CHECK(d.value(0.5) == doctest::Approx(3.0));
  CHECK(d.value(1.0) == doctest::Approx(4.0));
  CHECK(d.sup_bound().value() == doctest::Approx(4.0));

  // Path-functional kind: deterministic lookup must throw, slice lookup works.
  const AlphaProcess f = AlphaProcess::path_functional(
      [](double, const PathSlice& s) { return s.level(s.last_index).norm(); },
      /*bounded=*/true, 2.0, 2.0);
  CHECK_THROWS_AS(f.value(0.1), std::logic_error);
  const double levels[2] = {0.6, -0.8};
  const PathSlice slice{levels, 2, 0, 0.0, 0.1};
  CHECK(f.value(0.1, slice) == doctest::Approx(1.0));
}

TEST_CASE("generator presets evaluate as documented") {
  GeneratorParams p;
  p.beta = 2.0;
  const GeneratorSpec lin = make_generator("linear_y", p);
  CHECK(lin.eval_deterministic(0.1, 1.5, v1(9.0)) == doctest::Approx(-3.0));
  CHECK(lin.beta == doctest::Approx(2.0));

  GeneratorParams q;
  q.gamma = 4.0;
  const GeneratorSpec quad = make_generator("pure_quadratic", q);
  CHECK(quad.eval_deterministic(0.0, 7.0, v1(3.0)) == doctest::Approx(18.0));
  CHECK(quad.beta == 0.0);

  const GeneratorSpec zero = make_generator("zero", {});
  CHECK(zero.eval_deterministic(0.5, -2.0, v1(5.0)) == 0.0);

  GeneratorParams cd;
  cd.alpha0 = 0.25;
  const GeneratorSpec con = make_generator("constant_driver", cd);
  CHECK(con.eval_deterministic(0.9, 3.0, v1(-1.0)) == doctest::Approx(0.25));
  CHECK(con.alpha.sup_bound().value() == doctest::Approx(0.25));
}

TEST_CASE("mixed preset guards its monotonicity budget") {
  GeneratorParams p;
  p.beta = 1.0;
  p.c = 0.5;
  p.cap = 16.0;  // sqrt(cap)=4 > beta/c=2
  CHECK_THROWS_AS(make_generator("mixed", p), std::invalid_argument);
  p.cap = 4.0;
  CHECK_NOTHROW(make_generator("mixed", p));
  CHECK_THROWS_AS(make_generator("no_such_preset", {}), std::invalid_argument);
}

TEST_CASE("generator validator accepts every preset") {
  const GeneratorSamplePlan plan = GeneratorSamplePlan::default_box(1);
  for (const char* name : {"zero", "linear_y", "pure_quadratic", "constant_driver", "mixed"}) {
    const ValidationReport rep = validate_generator(make_generator(name, {}), plan);
    INFO(std::string(name));
    CHECK(rep.pass);
    for (const auto& cl : rep.clauses) CHECK(cl.worst_violation <= 0.0);
  }
}

TEST_CASE("generator validator flags a bad driver") {
  // +y^3 grows faster in y than any one-sided linear bound allows
  GeneratorSpec bad(
      [](double, double y, Eigen::Ref<const Eigen::VectorXd>, double) { return y * y * y; }, 1.0,
      1.0, ConvexModulus::linear(1.0), AlphaProcess::constant(0.0), 1, "cubic");
  const ValidationReport rep = validate_generator(bad, GeneratorSamplePlan::default_box(1));
  CHECK_FALSE(rep.pass);
  bool monotonicity_failed = false;
  for (const auto& cl : rep.clauses)
    if (!cl.pass && cl.worst_violation > 0.0) monotonicity_failed = true;
  CHECK(monotonicity_failed);
}

TEST_CASE("coefficient validator accepts presets and flags super-linear growth") {
  const CoefficientSamplePlan plan = CoefficientSamplePlan::default_box(1);
  for (const char* name : {"zero", "brownian", "constant_drift", "gbm", "sine_drift"}) {
    const ValidationReport rep = validate_coefficients(make_coefficients(name, {}, 1, 1), plan);
    INFO(std::string(name));
    CHECK(rep.pass);
  }

  SdeCoefficients bad(
      [](double, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> out) {
        out[0] = x[0] * x[0];
      },
      [](double, Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::MatrixXd> out) {
        out.setIdentity();
      },
      1.0, 1.0, 1, 1, "quadratic_drift");
  CHECK_FALSE(validate_coefficients(bad, plan).pass);
}

TEST_CASE("coefficient helpers agree with the in-place functions") {
  CoefficientParams p;
  p.b0 = 0.3;
  const SdeCoefficients c = make_coefficients("constant_drift", p, 2, 2);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 1.5);
  CHECK(c.drift(0.0, x)[0] == doctest::Approx(0.3));
  CHECK(c.diffusion(0.0, x)(0, 0) == doctest::Approx(1.0));
  CHECK(c.diffusion(0.0, x)(0, 1) == doctest::Approx(0.0));
  Eigen::VectorXd q(2);
  q << 2.0, -1.0;
  const Eigen::VectorXd sq = c.sigma_star_q(0.0, x, q);
  CHECK(sq[0] == doctest::Approx(2.0));
  CHECK(sq[1] == doctest::Approx(-1.0));
}

TEST_CASE("error types carry their context") {
  const EvaluationError e("bad value", "(t=0.5)");
  CHECK(std::string(e.what()).find("bad value") != std::string::npos);
  CHECK(std::string(e.what()).find("(t=0.5)") != std::string::npos);
  const ConfigError c("missing key");
  CHECK(std::string(c.what()).find("missing key") != std::string::npos);
}
