#include "mvu/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "mvu/io.hpp"

namespace mvu::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError(ErrorCode::invalid_argument,
                          "cannot write '" + path.string() + "' (output directory not writable?)");
  }
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json check(double estimate, double reference, double se) {
  const double diff = estimate - reference;
  // Slack of a few ulps so deterministic (zero-SE) runs compare equal.
  const double tol = 3.0 * se + 1e-12 * std::max(1.0, std::abs(reference));
  return {{"estimate", estimate}, {"closed_form", reference}, {"diff", diff}, {"se", se},
          {"pass", std::abs(diff) <= tol}};
}

std::string error_code_name(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->code()));
  return "internal_error";
}

}  // namespace

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;
  if (o.out) cfg.output_dir = *o.out;
  if (o.seed) cfg.simulate.sim.seed = *o.seed;
  if (o.convention) cfg.solver.convention = convention_from_string(*o.convention);
  if (o.method) cfg.solver.method = method_from_string(*o.method);
}

int run_solve(const RunConfig& cfg, const fs::path& out_dir) {
  const EquilibriumSolution sol = solve_equilibrium(cfg.model, cfg.solver);
  const auto& e = sol.exposure;
  const auto& p = sol.policy;
  const std::size_t last = e.grid.steps();

  json summary{{"command", "solve"},
               {"method", std::string(to_string(sol.method))},
               {"convention", std::string(to_string(p.convention))},
               {"iterations", e.iterations},
               {"residual", e.residual},
               {"damping", e.damping},
               {"terminal",
                {{"a", e.a[last]},
                 {"f", e.f[last]},
                 {"K", p.K[last]},
                 {"exact", e.a[last] == 1.0 && e.f[last] == 1.0 && p.K[last] == 0.0}}},
               {"clamped_nodes", p.clamped_count()},
               {"at_t0",
                {{"pi_tilde", e.pi_tilde[0]},
                 {"a", e.a[0]},
                 {"f", e.f[0]},
                 {"m", p.m[0]},
                 {"c_star", p.c_star[0]},
                 {"K", p.K[0]}}}};
  if (sol.method_gap) {
    summary["cross_method_sup_norm"] = *sol.method_gap;
    summary["cross_method_ok"] = *sol.method_gap < 1e-6;
  }
  const double z0 = cfg.model.x0 + p.K[0];
  summary["x0_plus_K0"] = z0;
  if (z0 > 0.0) {
    summary["value_at_x0"] = nullable(value_function(0.0, cfg.model.x0, sol));
    summary["dollar_policy_at_x0"] = dollar_policy(0.0, cfg.model.x0, sol);
  } else {
    summary["value_at_x0"] = nullptr;
    summary["dollar_policy_at_x0"] = nullptr;
  }
  summary["config"] = to_json(cfg);

  fs::create_directories(out_dir);
  if (cfg.wants("csv")) {
    auto out = open_output(out_dir / "solution.csv");
    write_solution_csv(out, sol);
  }
  if (cfg.wants("json")) write_json(out_dir / "summary.json", summary);
  return kSuccess;
}

int run_simulate(const RunConfig& cfg, const fs::path& out_dir) {
  const EquilibriumSolution sol = solve_equilibrium(cfg.model, cfg.solver);
  const StartState start = cfg.simulate.start.value_or(StartState{0.0, cfg.model.x0});
  const double z = total_wealth(start.t, start.x, sol);
  const PathEnsemble ens = simulate_paths(StrategySpec::equilibrium(sol), cfg.model,
                                          HumanCapitalCurve::from(sol), cfg.simulate.sim, start);
  const MomentEstimate m = estimate_moments(ens, cfg.model.prefs.delta, start.t);
  const double psi = cfg.model.prefs.gamma / z;
  const ObjectiveEstimate obj = estimate_objective(m, psi, cfg.model.prefs.beta);
  const TerminalMoments exact = expected_terminal_moments(start.t, start.x, sol);
  const double value = value_function(start.t, start.x, sol);

  double min_total = ens.min_total_wealth.front();
  for (double v : ens.min_total_wealth) min_total = std::min(min_total, v);

  json checks{{"y", check(m.y, exact.first, m.se_y)},
              {"z", check(m.z, exact.second, m.se_z)},
              {"objective", check(obj.value, value, obj.se)}};
  const bool all_pass = checks["y"]["pass"].get<bool>() && checks["z"]["pass"].get<bool>() &&
                        checks["objective"]["pass"].get<bool>();
  json doc{{"command", "simulate"},
           {"convention", std::string(to_string(sol.policy.convention))},
           {"start", {{"t", start.t}, {"x", start.x}, {"x_plus_K", z}}},
           {"scheme", std::string(to_string(ens.scheme))},
           {"seed", ens.seed},
           {"paths", ens.size()},
           {"steps", ens.n_steps},
           {"moments",
            {{"y", m.y}, {"z", m.z}, {"w", m.w}, {"se_y", m.se_y}, {"se_z", m.se_z},
             {"se_w", m.se_w}, {"variance", m.variance()}}},
           {"objective", {{"value", obj.value}, {"se", obj.se}, {"psi", psi}}},
           {"closed_form",
            {{"y", exact.first}, {"z", exact.second},
             {"variance", exact.second - exact.first * exact.first}, {"value", value}}},
           {"checks", checks},
           {"all_checks_pass", all_pass},
           {"min_x_plus_K", min_total},
           {"config", to_json(cfg)}};

  fs::create_directories(out_dir);
  if (cfg.wants("json")) write_json(out_dir / "simulation.json", doc);
  if (cfg.simulate.dump_paths && cfg.wants("csv")) {
    auto out = open_output(out_dir / "paths.csv");
    write_paths_csv(out, ens);
  }
  return kSuccess;
}

int run_verify(const RunConfig& cfg, const fs::path& out_dir) {
  const EquilibriumSolution sol = solve_equilibrium(cfg.model, cfg.solver);
  std::vector<EvalPoint> skipped;
  const std::vector<EvalPoint> points =
      cfg.verify.points ? *cfg.verify.points : default_points(sol, &skipped);
  SimulationConfig sim = cfg.simulate.sim;
  sim.n_paths = cfg.verify.n_paths;
  sim.n_steps = cfg.verify.n_steps;
  EquilibriumReport report =
      verify_equilibrium(points, cfg.verify.perturbations, cfg.verify.options, sol, sim);
  report.skipped_points = skipped;

  bool null_zero = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const GapCell& c : report.cells) {
    const GapEstimate& g = c.estimate;
    if (g.perturbation.null && g.gap != 0.0) null_zero = false;
    worst_margin = std::min(worst_margin, g.gap + report.slack * g.h + 3.0 * g.se);
  }
  json skipped_json = json::array();
  for (const auto& p : report.skipped_points) skipped_json.push_back({{"t", p.t}, {"x", p.x}});
  json doc{{"command", "verify"},
           {"convention", std::string(to_string(sol.policy.convention))},
           {"cells", report.cells.size()},
           {"passed", report.passed()},
           {"pass_rate", report.pass_rate()},
           {"complete", report.complete},
           {"abort_reason", report.abort_reason},
           {"null_gaps_zero", null_zero},
           {"worst_margin", nullable(worst_margin)},
           {"slack", report.slack},
           {"h_ladder", cfg.verify.options.h_ladder},
           {"skipped_points", skipped_json},
           {"all_pass", report.all_pass()},
           {"config", to_json(cfg)}};

  fs::create_directories(out_dir);
  if (cfg.wants("csv")) {
    auto out = open_output(out_dir / "report.csv");
    write_report_csv(out, report);
  }
  if (cfg.wants("json")) write_json(out_dir / "report.json", doc);
  return report.all_pass() ? kSuccess : kVerificationFailure;
}

int run_sweep(const RunConfig& cfg, const fs::path& out_dir) {
  if (!cfg.sweep || cfg.sweep->values.empty()) {
    throw ValidationError(ErrorCode::invalid_argument, "sweep needs 'sweep.parameter' and values");
  }
  const SweepSpec& spec = *cfg.sweep;
  ModelConfig probe = cfg.model;
  set_parameter(probe, spec.parameter, 0.0);  // rejects unknown names up front

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRow> rows;
  json failures = json::array();
  for (double value : spec.values) {
    ModelConfig model = cfg.model;
    set_parameter(model, spec.parameter, value);
    try {
      const EquilibriumSolution sol = solve_equilibrium(model, cfg.solver);
      for (std::size_t i = 0; i < sol.exposure.grid.size(); ++i) {
        rows.push_back({spec.parameter, value, sol.exposure.grid.node(i), sol.exposure.pi_tilde[i],
                        sol.policy.c_star[i], sol.policy.K[i], "ok"});
      }
    } catch (const Error& e) {
      const std::string code(to_string(e.code()));
      rows.push_back({spec.parameter, value, nan, nan, nan, nan, code});
      failures.push_back({{"value", value}, {"error", code}, {"message", e.what()}});
    }
  }
  fs::create_directories(out_dir);
  if (cfg.wants("csv")) {
    auto out = open_output(out_dir / "sweep.csv");
    write_sweep_csv(out, rows);
  }
  if (cfg.wants("json")) {
    write_json(out_dir / "sweep.json", {{"command", "sweep"},
                                        {"parameter", spec.parameter},
                                        {"values", spec.values},
                                        {"failures", failures},
                                        {"config", to_json(cfg)}});
  }
  return kSuccess;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return kConvergenceFailure;
  if (dynamic_cast<const SimulationError*>(&e)) return kRuntimeFailure;
  if (dynamic_cast<const Error*>(&e)) return kValidationError;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kValidationError;
  return kRuntimeFailure;
}

json error_json(const std::exception& e) {
  json doc{{"error", error_code_name(e)}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
  if (const auto* c = dynamic_cast<const ConvergenceError*>(&e)) {
    doc["iterations"] = c->iterations();
    doc["residual"] = c->residual();
  }
  if (const auto* r = dynamic_cast<const NoConsumptionRoot*>(&e)) {
    doc["node"] = r->node();
    doc["m"] = r->m_value();
  }
  if (const auto* s = dynamic_cast<const SimulationError*>(&e)) doc["path"] = s->path();
  return doc;
}

int run(Command cmd, const std::string& config_path, const Overrides& overrides,
        std::ostream& err) {
  std::optional<fs::path> out_dir;
  try {
    RunConfig cfg = load_run_config(config_path);
    apply_overrides(cfg, overrides);
    out_dir = cfg.output_dir;
    switch (cmd) {
      case Command::solve: return run_solve(cfg, *out_dir);
      case Command::simulate: return run_simulate(cfg, *out_dir);
      case Command::verify: return run_verify(cfg, *out_dir);
      case Command::sweep: return run_sweep(cfg, *out_dir);
    }
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    const json doc = error_json(e);
    err << doc.dump() << '\n';
    if (out_dir) {
      std::error_code ec;
      fs::create_directories(*out_dir, ec);
      std::ofstream f(*out_dir / "error.json");
      if (f) f << doc.dump(2) << '\n';
    }
    return exit_code_for(e);
  }
}

}  // namespace mvu::cli
