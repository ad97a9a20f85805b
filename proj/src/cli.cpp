#include "bsdelab/cli/runner.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsdelab/approx/inf_convolution.hpp"
#include "bsdelab/approx/localization.hpp"
#include "bsdelab/bsde/bounds.hpp"
#include "bsdelab/bsde/solver.hpp"
#include "bsdelab/compare/comparison.hpp"
#include "bsdelab/core/errors.hpp"
#include "bsdelab/core/presets.hpp"
#include "bsdelab/core/validate.hpp"
#include "bsdelab/repr/representation.hpp"
#include "bsdelab/report/report.hpp"
#include "bsdelab/sde/path_io.hpp"
#include "bsdelab/sde/paths.hpp"
#include "bsdelab/sde/stopping.hpp"

namespace bsdelab::cli {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------- helpers

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const json& require_key(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("config: missing required key '") + key + "'");
  return *it;
}

std::string jstr(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_string()) throw ConfigError(std::string("config: '") + key + "' must be a string");
  return v.get<std::string>();
}

double jnum(const json& j, const char* key, double def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  return it->get<double>();
}

int jint(const json& j, const char* key, int def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  return static_cast<int>(std::llround(it->get<double>()));
}

bool jbool(const json& j, const char* key, bool def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_boolean()) throw ConfigError(std::string("config: '") + key + "' must be a boolean");
  return it->get<bool>();
}

Eigen::VectorXd jvec(const json& v, const char* what) {
  if (v.is_number()) return Eigen::VectorXd::Constant(1, v.get<double>());
  if (!v.is_array())
    throw ConfigError(std::string("config: '") + what + "' must be a number or an array");
  Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("config: '") + what + "' has a non-number entry");
    r[i++] = e.get<double>();
  }
  return r;
}

std::vector<double> jnum_list(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigError(std::string("config: '") + what + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("config: '") + what + "' has a non-number entry");
    out.push_back(e.get<double>());
  }
  return out;
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

const char* verdict_word(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "inconclusive";
  }
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Pass: return kExitPass;
    case Verdict::Fail: return kExitFail;
    default: return kExitInconclusive;
  }
}

// ---------------------------------------------------------------- parsers

ConvexModulus parse_phi(const json& j) {
  if (!j.is_object()) throw ConfigError("config: 'phi' must be an object");
  const std::string fam = jstr(j, "family");
  const double par = jnum(j, "parameter", 1.0);
  if (fam == "power") return ConvexModulus::power(par);
  if (fam == "exp_minus_one") return ConvexModulus::exp_minus_one(par);
  if (fam == "linear") return ConvexModulus::linear(par);
  throw ConfigError("config: unknown phi family '" + fam + "'");
}

GeneratorSpec parse_generator(const json& j) {
  if (!j.is_object()) throw ConfigError("config: 'generator' must be an object");
  const std::string preset = jstr(j, "preset");
  GeneratorParams p;
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("config: generator 'params' must be an object");
    for (const auto& [key, val] : it->items()) {
      if (!val.is_number())
        throw ConfigError("config: generator param '" + key + "' must be a number");
      const double x = val.get<double>();
      if (key == "beta") p.beta = x;
      else if (key == "gamma") p.gamma = x;
      else if (key == "c") p.c = x;
      else if (key == "cap") p.cap = x;
      else if (key == "alpha0") p.alpha0 = x;
      else if (key == "offset") p.offset = x;
      else if (key == "horizon") p.horizon = x;
      else throw ConfigError("config: unknown generator param '" + key + "'");
    }
  }
  const int dim_z = jint(j, "dim_z", 1);
  return make_generator(preset, p, dim_z);
}

SdeCoefficients parse_coefficients(const json& j) {
  if (!j.is_object()) throw ConfigError("config: 'coefficients' must be an object");
  const std::string preset = jstr(j, "preset");
  CoefficientParams p;
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("config: coefficient 'params' must be an object");
    for (const auto& [key, val] : it->items()) {
      if (!val.is_number())
        throw ConfigError("config: coefficient param '" + key + "' must be a number");
      const double x = val.get<double>();
      if (key == "b0") p.b0 = x;
      else if (key == "theta") p.theta = x;
      else if (key == "eta") p.eta = x;
      else throw ConfigError("config: unknown coefficient param '" + key + "'");
    }
  }
  const int dim_x = jint(j, "dim_x", 1);
  const int dim_b = jint(j, "dim_b", 1);
  return make_coefficients(preset, p, dim_x, dim_b);
}

SolverConfig parse_solver(const json& cfg) {
  SolverConfig sc;
  auto it = cfg.find("solver");
  if (it == cfg.end()) return sc;
  const json& j = *it;
  if (!j.is_object()) throw ConfigError("config: 'solver' must be an object");
  const std::string basis = j.value("basis", std::string("polynomial"));
  if (basis == "polynomial") {
    sc.basis = RegressionBasis::polynomial(jint(j, "degree", 3));
  } else if (basis == "piecewise_constant") {
    sc.basis = RegressionBasis::piecewise_constant(jint(j, "bins", 16), jnum(j, "lo", -5.0),
                                                   jnum(j, "hi", 5.0));
  } else {
    throw ConfigError("config: unknown basis '" + basis + "'");
  }
  sc.picard_max = jint(j, "picard_max", sc.picard_max);
  sc.picard_tol = jnum(j, "picard_tol", sc.picard_tol);
  sc.z_clip = jnum(j, "z_clip", sc.z_clip);
  const std::string scheme = j.value("scheme", std::string("implicit_y"));
  if (scheme == "implicit_y") sc.scheme = Scheme::ImplicitY;
  else if (scheme == "explicit") sc.scheme = Scheme::ExplicitBackwardEuler;
  else throw ConfigError("config: unknown scheme '" + scheme + "'");
  return sc;
}

struct Anchor {
  double t = 0.0;
  Eigen::VectorXd x;
  double y = 0.0;
  Eigen::VectorXd q;
};

Anchor parse_anchor(const json& cfg, int dim_x) {
  Anchor a;
  a.x = Eigen::VectorXd::Zero(dim_x);
  a.q = Eigen::VectorXd::Ones(dim_x);
  auto it = cfg.find("anchor");
  if (it == cfg.end()) return a;
  const json& j = *it;
  if (!j.is_object()) throw ConfigError("config: 'anchor' must be an object");
  a.t = jnum(j, "t", 0.0);
  a.y = jnum(j, "y", 0.0);
  if (auto x = j.find("x"); x != j.end()) a.x = jvec(*x, "anchor.x");
  if (auto q = j.find("q"); q != j.end()) a.q = jvec(*q, "anchor.q");
  if (a.x.size() != dim_x)
    throw ConfigError("config: anchor.x dimension != coefficient state dimension");
  if (a.q.size() != dim_x)
    throw ConfigError("config: anchor.q dimension != coefficient state dimension");
  return a;
}

Eigen::VectorXd build_terminal(const json& j, const PathEnsemble& b) {
  if (!j.is_object()) throw ConfigError("config: 'terminal' must be an object");
  const std::string kind = jstr(j, "kind");
  const int last = b.grid.n_steps;
  Eigen::VectorXd xi(b.n_paths);
  if (kind == "constant") {
    xi.setConstant(jnum(j, "value", 0.0));
  } else if (kind == "clipped_brownian") {
    const double lo = jnum(j, "lo", -2.0);
    const double hi = jnum(j, "hi", 2.0);
    if (!(lo <= hi)) throw ConfigError("config: terminal clip needs lo <= hi");
    for (int p = 0; p < b.n_paths; ++p)
      xi[p] = std::clamp(b.state(p, last)[0], lo, hi);
  } else if (kind == "linear_brownian") {
    Eigen::VectorXd c = Eigen::VectorXd::Ones(b.dim);
    if (auto it = j.find("coeffs"); it != j.end()) c = jvec(*it, "terminal.coeffs");
    if (c.size() != b.dim) throw ConfigError("config: terminal.coeffs dimension mismatch");
    const double off = jnum(j, "offset", 0.0);
    for (int p = 0; p < b.n_paths; ++p) xi[p] = off + c.dot(b.state(p, last));
  } else {
    throw ConfigError("config: unknown terminal kind '" + kind + "'");
  }
  return xi;
}

// ---------------------------------------------------------------- commands

struct CommandResult {
  Verdict verdict = Verdict::Inconclusive;
  std::string summary;
  CsvTable table;
  json results = json::object();
};

CommandResult cmd_validate(const json& cfg) {
  CommandResult res;
  res.table.columns = {"subject", "clause", "pass", "worst_violation", "worst_point"};
  std::vector<ValidationReport> reports;
  const GeneratorSpec gen = parse_generator(require_key(cfg, "generator"));
  reports.push_back(validate_generator(gen, GeneratorSamplePlan::default_box(gen.dim_z)));
  if (auto it = cfg.find("coefficients"); it != cfg.end()) {
    const SdeCoefficients coeffs = parse_coefficients(*it);
    reports.push_back(
        validate_coefficients(coeffs, CoefficientSamplePlan::default_box(coeffs.dim_x)));
  }
  bool all_pass = true;
  int n_clauses = 0;
  json subjects = json::array();
  for (const auto& rep : reports) {
    all_pass = all_pass && rep.pass;
    json clauses = json::array();
    for (const auto& cl : rep.clauses) {
      ++n_clauses;
      res.table.add_row({rep.subject, cl.clause, std::string(cl.pass ? "true" : "false"),
                         cl.worst_violation, cl.worst_point});
      clauses.push_back({{"clause", cl.clause},
                         {"pass", cl.pass},
                         {"worst_violation", cl.worst_violation},
                         {"worst_point", cl.worst_point}});
    }
    subjects.push_back({{"subject", rep.subject}, {"pass", rep.pass}, {"clauses", clauses}});
  }
  res.results["subjects"] = subjects;
  res.verdict = all_pass ? Verdict::Pass : Verdict::Fail;
  res.summary = "validate: " + std::string(verdict_word(res.verdict)) + " (" +
                std::to_string(n_clauses) + " clauses)";
  return res;
}

CommandResult cmd_simulate(const json& cfg, std::uint64_t seed, const std::string& out_dir) {
  CommandResult res;
  const int n_paths = jint(cfg, "n_paths", 4096);
  const int n_steps = jint(cfg, "n_steps", 64);
  const double horizon = jnum(cfg, "horizon", 1.0);
  const double t0 = jnum(cfg, "t", 0.0);
  const TimeGrid grid = TimeGrid::uniform(t0, t0 + horizon, n_steps);

  bool has_coeffs = cfg.contains("coefficients");
  SdeCoefficients coeffs =
      has_coeffs ? parse_coefficients(cfg.at("coefficients")) : SdeCoefficients{};
  const int dim_b = has_coeffs ? coeffs.dim_b : jint(cfg, "dim", 1);

  PathEnsemble b = simulate_brownian(grid, dim_b, n_paths, seed);
  PathEnsemble x;
  const PathEnsemble& paths = has_coeffs ? x : b;
  if (has_coeffs) {
    const Anchor anchor = parse_anchor(cfg, coeffs.dim_x);
    x = euler_maruyama(coeffs, anchor.x, b);
  }
  if (!paths.data.allFinite()) throw EvaluationError("simulate: non-finite state", "euler step");

  res.table.columns = {"step", "time", "mean_first", "sd_first", "mean_norm", "max_norm"};
  for (int k = 0; k <= n_steps; ++k) {
    const auto block = paths.step_block(k);
    const Eigen::VectorXd first = block.row(0).transpose();
    const double mean = first.mean();
    const double sd =
        n_paths > 1 ? std::sqrt((first.array() - mean).square().sum() / (n_paths - 1)) : 0.0;
    const Eigen::VectorXd norms = block.colwise().norm().transpose();
    res.table.add_row({static_cast<double>(k), grid.points[static_cast<std::size_t>(k)], mean, sd,
                       norms.mean(), norms.maxCoeff()});
  }

  res.results["n_paths"] = n_paths;
  res.results["n_steps"] = n_steps;
  res.results["dim"] = paths.dim;
  if (cfg.contains("c0")) {
    const double c0 = jnum(cfg, "c0", 5.0);
    const HittingTimes ht = hitting_time(paths, c0);
    res.results["c0"] = c0;
    res.results["stopped_fraction"] = static_cast<double>(ht.n_stopped) / n_paths;
  }
  if (auto out = cfg.find("output"); out != cfg.end() && out->contains("paths")) {
    const std::string file =
        (std::filesystem::path(out_dir) / jstr(*out, "paths")).string();
    write_paths(file, paths);
    res.results["paths_file"] = jstr(*out, "paths");
  }
  res.verdict = Verdict::Pass;
  res.summary = "simulate: pass (" + std::to_string(n_paths) + " paths, " +
                std::to_string(n_steps) + " steps, dim " + std::to_string(paths.dim) + ")";
  return res;
}

CommandResult cmd_solve(const json& cfg, std::uint64_t seed) {
  CommandResult res;
  const GeneratorSpec gen = parse_generator(require_key(cfg, "generator"));
  const int n_paths = jint(cfg, "n_paths", 1 << 14);
  const int n_steps = jint(cfg, "n_steps", 64);
  const double horizon = jnum(cfg, "horizon", 1.0);
  const double t0 = jnum(cfg, "t", 0.0);
  const TimeGrid grid = TimeGrid::uniform(t0, t0 + horizon, n_steps);
  const SolverConfig sc = parse_solver(cfg);

  PathEnsemble b = simulate_brownian(grid, gen.dim_z, n_paths, seed);
  PathEnsemble x;
  HittingTimes ht;
  const PathEnsemble* states = nullptr;
  const HittingTimes* stop = nullptr;
  if (auto it = cfg.find("coefficients"); it != cfg.end()) {
    const SdeCoefficients coeffs = parse_coefficients(*it);
    if (coeffs.dim_b != gen.dim_z)
      throw ConfigError("config: coefficients dim_b must match generator dim_z");
    const Anchor anchor = parse_anchor(cfg, coeffs.dim_x);
    x = euler_maruyama(coeffs, anchor.x, b);
    if (cfg.contains("c0")) {
      ht = hitting_time(x, jnum(cfg, "c0", 5.0));
      freeze_after(x, ht);
      stop = &ht;
    }
    states = &x;
  }
  const Eigen::VectorXd terminal = build_terminal(require_key(cfg, "terminal"), b);
  const BsdeSolution sol = solve_bsde(gen, terminal, b, states, stop, sc);

  const BoundReport bg = check_bound_global(sol, gen, terminal);
  const bool terminal_zero = terminal.size() == 0 || terminal.cwiseAbs().maxCoeff() <= 1e-12;
  BoundReport bs;
  bs.applicable = false;
  bs.detail = "terminal not identically zero";
  if (terminal_zero) bs = check_bound_small_horizon(sol, gen);

  res.table.columns = {"quantity", "value"};
  res.table.add_row({std::string("y0"), sol.y0});
  res.table.add_row({std::string("y0_std_error"), sol.y0_std_error});
  res.table.add_row({std::string("picard_iterations"), static_cast<double>(sol.diag.picard_iterations)});
  res.table.add_row({std::string("picard_residual"), sol.diag.picard_residual});
  res.table.add_row({std::string("regression_condition"), sol.diag.regression_condition});
  res.table.add_row({std::string("clipped_fraction"), sol.diag.clipped_fraction});
  res.table.add_row({std::string("bound_global"), bg.bound});
  res.table.add_row({std::string("observed_sup"), bg.observed});

  auto bound_json = [](const BoundReport& r) {
    return json{{"applicable", r.applicable}, {"pass", r.pass},     {"bound", r.bound},
                {"observed", r.observed},     {"margin", r.margin}, {"detail", r.detail}};
  };
  res.results["y0"] = sol.y0;
  res.results["y0_std_error"] = sol.y0_std_error;
  res.results["diagnostics"] = {{"picard_iterations", sol.diag.picard_iterations},
                                {"picard_residual", sol.diag.picard_residual},
                                {"regression_condition", sol.diag.regression_condition},
                                {"clipped_fraction", sol.diag.clipped_fraction}};
  res.results["bound_global"] = bound_json(bg);
  res.results["bound_small_horizon"] = bound_json(bs);

  const bool ok = (!bg.applicable || bg.pass) && (!bs.applicable || bs.pass);
  res.verdict = ok ? Verdict::Pass : Verdict::Fail;
  res.summary = "solve: " + std::string(verdict_word(res.verdict)) + " (y0 " + short_num(sol.y0) +
                " +- " + short_num(sol.y0_std_error) + ")";
  return res;
}

CommandResult cmd_approx(const json& cfg) {
  CommandResult res;
  const json& a = require_key(cfg, "approx");
  if (!a.is_object()) throw ConfigError("config: 'approx' must be an object");

  InfConvSpec spec;
  spec.dim = jint(a, "dim", 1);
  const std::string fname = a.value("f", std::string("square"));
  if (fname == "square") {
    spec.f = [](Eigen::Ref<const Eigen::VectorXd> x) { return x.squaredNorm(); };
    spec.phi = ConvexModulus::power(2.0);
    spec.a = 0.0;
    spec.K = 1.0;
    spec.name = "square";
  } else if (fname == "abs") {
    spec.f = [](Eigen::Ref<const Eigen::VectorXd> x) { return x.norm(); };
    spec.phi = ConvexModulus::linear(1.0);
    spec.a = 0.0;
    spec.K = 1.0;
    spec.name = "abs";
  } else {
    throw ConfigError("config: unknown approx target '" + fname + "'");
  }
  spec.a = jnum(a, "a", spec.a);
  spec.K = jnum(a, "K", spec.K);
  if (auto it = a.find("phi"); it != a.end()) spec.phi = parse_phi(*it);
  spec.search_radius = jnum(a, "search_radius", 0.0);
  spec.search_spacing = jnum(a, "search_spacing", 0.0);

  std::vector<Eigen::VectorXd> grid;
  if (auto it = a.find("x_grid"); it != a.end() && it->is_array()) {
    for (const auto& e : *it) grid.push_back(jvec(e, "approx.x_grid"));
  } else {
    const json g = a.value("x_grid", json::object());
    const double lo = jnum(g, "lo", -5.0);
    const double hi = jnum(g, "hi", 5.0);
    const int n = jint(g, "n", 101);
    if (n < 1 || !(lo <= hi)) throw ConfigError("config: approx.x_grid needs lo <= hi and n >= 1");
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.dim);
      x[0] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
      grid.push_back(std::move(x));
    }
  }
  for (const auto& x : grid)
    if (x.size() != spec.dim) throw ConfigError("config: approx.x_grid entry dimension mismatch");

  std::vector<int> ns;
  if (auto it = a.find("n_schedule"); it != a.end()) {
    for (double v : jnum_list(*it, "approx.n_schedule")) ns.push_back(static_cast<int>(v));
  } else {
    for (int n = 1; n <= 256; n *= 2) ns.push_back(n);
  }

  const SequenceReport rep = approx_sequence_check(spec, grid, ns);
  res.table.columns = {"x", "n", "value", "envelope", "gap"};
  for (const auto& pt : rep.points)
    res.table.add_row({pt.x_coord, static_cast<double>(pt.n), pt.value, pt.envelope, pt.gap});

  res.results["f"] = spec.name;
  res.results["bound_ok"] = rep.bound_ok;
  res.results["monotone_ok"] = rep.monotone_ok;
  res.results["gap_shrinks"] = rep.gap_shrinks;
  res.results["worst_violation"] = rep.worst_violation;
  res.results["worst_point"] = rep.worst_point;

  const bool ok = rep.bound_ok && rep.monotone_ok && rep.gap_shrinks;
  res.verdict = ok ? Verdict::Pass : Verdict::Fail;
  res.summary = "approx: " + std::string(verdict_word(res.verdict)) + " (" + spec.name + ", " +
                std::to_string(grid.size()) + " points, " + std::to_string(ns.size()) +
                " penalty levels)";
  return res;
}

RepresentationTask make_task(const json& cfg, std::uint64_t seed) {
  RepresentationTask task;
  task.gen = parse_generator(require_key(cfg, "generator"));
  if (auto it = cfg.find("coefficients"); it != cfg.end())
    task.coeffs = parse_coefficients(*it);
  else
    task.coeffs = make_coefficients("brownian", {}, task.gen.dim_z, task.gen.dim_z);
  if (task.coeffs.dim_b != task.gen.dim_z)
    throw ConfigError("config: coefficients dim_b must match generator dim_z");

  const Anchor anchor = parse_anchor(cfg, task.coeffs.dim_x);
  task.t = anchor.t;
  task.x = anchor.x;
  task.y = anchor.y;
  task.q = anchor.q;
  task.horizon = jnum(cfg, "horizon", 1.0);
  task.c0 = jnum(cfg, "c0", 5.0);
  if (auto it = cfg.find("epsilons"); it != cfg.end())
    task.epsilons = jnum_list(*it, "epsilons");
  else
    task.epsilons = default_epsilon_schedule(task.horizon - task.t);
  const std::string mode = cfg.value("mode", std::string("l1"));
  if (mode == "l1") task.mode = RepresentationMode::L1;
  else if (mode == "lp") task.mode = RepresentationMode::Lp;
  else if (mode == "pathwise") task.mode = RepresentationMode::Pathwise;
  else throw ConfigError("config: unknown mode '" + mode + "'");
  task.p = jnum(cfg, "p", 2.0);
  task.solver = parse_solver(cfg);
  task.n_paths = jint(cfg, "n_paths", 1 << 14);
  task.n_steps = jint(cfg, "n_steps", 64);
  task.n_replicates = jint(cfg, "n_replicates", task.n_replicates);
  task.seed = seed;
  if (auto it = cfg.find("conditioning_states"); it != cfg.end()) {
    if (!it->is_array()) throw ConfigError("config: 'conditioning_states' must be an array");
    for (const auto& e : *it) task.conditioning_states.push_back(jvec(e, "conditioning_states"));
  }
  return task;
}

void fill_sweep_table(CsvTable& table, const ConvergenceReport& rep) {
  table.columns = {"epsilon", "estimate", "std_error", "abs_error"};
  for (const auto& row : rep.rows)
    table.add_row({row.epsilon, row.estimate, row.std_error, row.abs_error});
}

json sweep_json(const ConvergenceReport& rep) {
  return json{{"target", rep.target},
              {"fitted_limit", rep.fitted_limit},
              {"fitted_limit_se", rep.fitted_limit_se},
              {"fitted_rate", rep.fitted_rate},
              {"verdict", verdict_word(rep.verdict)},
              {"note", rep.note}};
}

CommandResult cmd_represent(const json& cfg, std::uint64_t seed, bool force_lp) {
  CommandResult res;
  RepresentationTask task = make_task(cfg, seed);
  if (force_lp) task.mode = RepresentationMode::Lp;

  if (task.mode == RepresentationMode::Pathwise) {
    const PathwiseReport rep = pathwise_sweep(task);
    res.table.columns = {"state_index", "anchor_x", "epsilon", "estimate", "std_error",
                         "abs_error"};
    json states = json::array();
    for (std::size_t s = 0; s < rep.reports.size(); ++s) {
      for (const auto& row : rep.reports[s].rows)
        res.table.add_row({static_cast<double>(s), rep.states[s][0], row.epsilon, row.estimate,
                           row.std_error, row.abs_error});
      json entry = sweep_json(rep.reports[s]);
      entry["state"] = vec_json(rep.states[s]);
      states.push_back(entry);
    }
    res.results["states"] = states;
    res.verdict = rep.verdict;
    res.summary = std::string("represent: ") + verdict_word(res.verdict) + " (pathwise, " +
                  std::to_string(rep.states.size()) + " states)";
    return res;
  }

  const ConvergenceReport rep =
      task.mode == RepresentationMode::Lp ? lp_sweep(task) : epsilon_sweep(task);
  fill_sweep_table(res.table, rep);
  res.results = sweep_json(rep);
  res.verdict = rep.verdict;
  const std::string label = force_lp ? "lp-sweep" : "represent";
  res.summary = label + ": " + verdict_word(res.verdict) + " (limit " +
                short_num(rep.fitted_limit) + " vs target " + short_num(rep.target) + ", rate " +
                short_num(rep.fitted_rate) + ")";
  if (!rep.note.empty()) res.summary += " [" + rep.note + "]";
  return res;
}

CommandResult cmd_z_energy(const json& cfg, std::uint64_t seed) {
  CommandResult res;
  RepresentationTask task = make_task(cfg, seed);
  if (!cfg.contains("epsilons")) task.epsilons = {0.2, 0.1, 0.05, 0.025};
  const DecayReport rep = z_energy_decay(task);

  res.table.columns = {"epsilon", "energy"};
  for (const auto& row : rep.rows) res.table.add_row({row.epsilon, row.energy});
  res.results["first"] = rep.first;
  res.results["final"] = rep.final;
  res.results["pass"] = rep.pass;
  res.results["note"] = rep.note;
  res.verdict = rep.pass ? Verdict::Pass : Verdict::Fail;
  res.summary = std::string("z-energy: ") + verdict_word(res.verdict) + " (first " +
                short_num(rep.first) + ", final " + short_num(rep.final) + ")";
  if (!rep.note.empty()) res.summary += " [" + rep.note + "]";
  return res;
}

CommandResult cmd_compare(const json& cfg, std::uint64_t seed) {
  CommandResult res;
  const GeneratorSpec g1 = parse_generator(require_key(cfg, "generator"));
  const json& c = require_key(cfg, "compare");
  if (!c.is_object()) throw ConfigError("config: 'compare' must be an object");
  const GeneratorSpec g2 = parse_generator(require_key(c, "generator2"));
  if (g1.dim_z != g2.dim_z) throw ConfigError("config: compared generators must share dim_z");

  std::vector<std::pair<double, Eigen::VectorXd>> probes;
  if (auto it = c.find("probes"); it != c.end()) {
    if (!it->is_array()) throw ConfigError("config: compare.probes must be an array");
    for (const auto& e : *it) {
      if (!e.is_object()) throw ConfigError("config: compare.probes entries must be objects");
      Eigen::VectorXd z = Eigen::VectorXd::Zero(g1.dim_z);
      if (auto zj = e.find("z"); zj != e.end()) z = jvec(*zj, "compare.probes.z");
      if (z.size() != g1.dim_z) throw ConfigError("config: compare probe z dimension mismatch");
      probes.emplace_back(jnum(e, "y", 0.0), std::move(z));
    }
  } else {
    if (g1.dim_z != 1)
      throw ConfigError("config: default probe grid needs dim_z = 1; give compare.probes");
    for (double y : {-1.0, 0.0, 1.0})
      for (double z : {-1.0, 0.0, 1.0})
        probes.emplace_back(y, Eigen::VectorXd::Constant(1, z));
  }

  CompareConfig cc;
  if (auto it = cfg.find("epsilons"); it != cfg.end()) cc.epsilons = jnum_list(*it, "epsilons");
  cc.solver = parse_solver(cfg);
  cc.n_paths = jint(cfg, "n_paths", cc.n_paths);
  cc.n_steps = jint(cfg, "n_steps", cc.n_steps);
  cc.hyp_n_paths = jint(c, "hyp_n_paths", cc.hyp_n_paths);
  cc.hyp_n_steps = jint(c, "hyp_n_steps", cc.hyp_n_steps);
  cc.hyp_tol = jnum(c, "hyp_tol", cc.hyp_tol);
  cc.horizon = jnum(cfg, "horizon", cc.horizon);
  cc.c0 = jnum(cfg, "c0", cc.c0);
  cc.seed = seed;

  const GeneratorOrderReport rep = converse_compare(g1, g2, probes, cc);
  res.table.columns = {"y",        "z",        "limit1",    "limit2", "se1",
                       "se2",      "direct_g1", "direct_g2", "tolerance", "pass"};
  for (const auto& row : rep.rows)
    res.table.add_row({row.y, row.z.size() ? row.z[0] : 0.0, row.limit1, row.limit2, row.se1,
                       row.se2, row.direct_g1, row.direct_g2, row.tolerance,
                       std::string(row.pass ? "true" : "false")});

  res.results["hypothesis_ok"] = rep.hypothesis_ok;
  res.results["hypothesis_min_gap"] = rep.hypothesis_min_gap;
  res.results["note"] = rep.note;
  res.results["n_probes"] = probes.size();
  res.verdict = rep.verdict;
  res.summary = std::string("compare: ") + verdict_word(res.verdict) + " (" +
                std::to_string(rep.rows.size()) + " probes)";
  if (!rep.note.empty()) res.summary += " [" + rep.note + "]";
  return res;
}

CommandResult dispatch(const std::string& command, const json& cfg, std::uint64_t seed,
                       const std::string& out_dir) {
  if (command == "validate") return cmd_validate(cfg);
  if (command == "simulate") return cmd_simulate(cfg, seed, out_dir);
  if (command == "solve") return cmd_solve(cfg, seed);
  if (command == "approx") return cmd_approx(cfg);
  if (command == "represent") return cmd_represent(cfg, seed, false);
  if (command == "lp-sweep") return cmd_represent(cfg, seed, true);
  if (command == "z-energy") return cmd_z_energy(cfg, seed);
  if (command == "compare") return cmd_compare(cfg, seed);
  throw ConfigError("config: unknown command '" + command + "'");
}

std::string default_name(std::string command, const char* ext) {
  std::replace(command.begin(), command.end(), '-', '_');
  return command + "_report." + ext;
}

}  // namespace

int run(const CliOptions& opts) {
  try {
    std::ifstream is(opts.config_path, std::ios::binary);
    if (!is) {
      std::cerr << "configuration error: cannot open config file: " << opts.config_path << "\n";
      return kExitConfigError;
    }
    json cfg;
    try {
      cfg = json::parse(is);
    } catch (const json::parse_error& e) {
      std::cerr << "configuration error: malformed config: " << e.what() << "\n";
      return kExitConfigError;
    }
    if (!cfg.is_object()) {
      std::cerr << "configuration error: config root must be a JSON object\n";
      return kExitConfigError;
    }

    if (opts.seed_override) cfg["seed"] = *opts.seed_override;
    auto seed_it = cfg.find("seed");
    if (seed_it == cfg.end()) {
      std::cerr << "configuration error: seed required (set \"seed\" or pass --seed)\n";
      return kExitConfigError;
    }
    if (!seed_it->is_number_integer() && !seed_it->is_number_unsigned()) {
      std::cerr << "configuration error: seed must be an unsigned integer\n";
      return kExitConfigError;
    }
    const std::uint64_t seed = seed_it->get<std::uint64_t>();

    const std::string command = jstr(cfg, "command");

    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) {
      std::cerr << "configuration error: cannot create output directory '" << opts.out_dir
                << "': " << ec.message() << "\n";
      return kExitConfigError;
    }

    const CommandResult res = dispatch(command, cfg, seed, opts.out_dir);

    std::string csv_name = default_name(command, "csv");
    std::string json_name = default_name(command, "json");
    if (auto it = cfg.find("output"); it != cfg.end()) {
      if (!it->is_object()) throw ConfigError("config: 'output' must be an object");
      if (it->contains("csv")) csv_name = jstr(*it, "csv");
      if (it->contains("json")) json_name = jstr(*it, "json");
    }
    const auto dir = std::filesystem::path(opts.out_dir);
    try {
      write_text_file((dir / csv_name).string(), res.table.to_string());
      json doc;
      doc["command"] = command;
      doc["config"] = cfg;
      doc["seed"] = seed;
      doc["verdict"] = verdict_word(res.verdict);
      doc["summary"] = res.summary;
      doc["results"] = res.results;
      write_json_file((dir / json_name).string(), doc);
    } catch (const std::runtime_error& e) {
      std::cerr << "configuration error: unwritable output path: " << e.what() << "\n";
      return kExitConfigError;
    }

    if (!opts.quiet) std::cout << res.summary << "\n";
    return verdict_exit(res.verdict);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const PicardError& e) {
    std::cerr << "inconclusive: Picard iteration did not converge: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const RegressionError& e) {
    std::cerr << "inconclusive: regression failed: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const EvaluationError& e) {
    std::cerr << "inconclusive: evaluation failed: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace bsdelab::cli
