// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mvu/mc_engine.hpp"
#include "mvu/solver.hpp"
#include "mvu/verifier.hpp"

using namespace mvu;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("AC%-2d %s  %s: %s [%.2fs]\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ModelConfig p1() {
  ModelConfig cfg;
  cfg.market = {0.03, 0.08, 0.2};
  cfg.prefs = {2.0, 1.0, 0.0, 0.0};
  cfg.utility = UtilitySpec::logarithmic();
  cfg.income = IncomeProfile::constant(0.2, 1.0);
  cfg.horizon = 1.0;
  cfg.x0 = 1.0;
  return cfg;
}

std::vector<ModelConfig> grid_configs(bool zero_premium = false) {
  std::vector<ModelConfig> out;
  for (double gamma : {1.0, 2.0, 4.0}) {
    for (double premium : {0.02, 0.05, 0.08}) {
      for (double T : {0.5, 1.0, 5.0}) {
        ModelConfig cfg = p1();
        cfg.prefs.gamma = gamma;
        cfg.market.mu = cfg.market.r + (zero_premium ? 0.0 : premium);
        cfg.allow_zero_premium = zero_premium;
        cfg.horizon = T;
        cfg.income = IncomeProfile::constant(0.2, T);
        out.push_back(cfg);
      }
    }
  }
  return out;
}

std::string label(const ModelConfig& c) {
  return fmt("gamma=%g premium=%g T=%g", c.prefs.gamma, c.market.mu - c.market.r, c.horizon);
}

SimulationConfig mc(std::size_t paths, std::size_t steps) {
  SimulationConfig sim;
  sim.n_paths = paths;
  sim.n_steps = steps;
  return sim;
}

}  // namespace

int main() {
  const ModelConfig base = p1();

  report(1, "terminal conditions", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const EquilibriumSolution sol = solve_equilibrium(base);
    const double secs = elapsed_since(t0);
    const auto& e = sol.exposure;
    const bool exact = e.a.back() == 1.0 && e.f.back() == 1.0 && sol.policy.K.back() == 0.0;
    return Outcome{exact && secs < 1.0,
                   fmt("a(T)=%.17g f(T)=%.17g K(T)=%.17g solve %.3fs (limit 1s)", e.a.back(), e.f.back(),
                       sol.policy.K.back(), secs)};
  });

  std::vector<ExposurePath> picard;
  report(2, "fixed-point residual", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int min_it = std::numeric_limits<int>::max();
    int max_it = 0;
    for (const ModelConfig& cfg : grid_configs()) {
      const TimeGrid grid(cfg.horizon, 1000);
      picard.push_back(solve_exposure_picard(cfg, grid));
      worst = std::max(worst, fixed_point_residual(cfg, grid, picard.back().pi_tilde));
      min_it = std::min(min_it, picard.back().iterations);
      max_it = std::max(max_it, picard.back().iterations);
    }
    const double secs = elapsed_since(t0);
    return Outcome{worst <= 1e-10 && secs < 10.0,
                   fmt("27 configs, max residual %.3g (limit 1e-10), iterations %d..%d, %.2fs (limit 10s)", worst,
                       min_it, max_it, secs)};
  });

  report(3, "Picard vs RK4 agreement", [&] {
    const auto configs = grid_configs();
    if (picard.size() != configs.size()) return Outcome{false, "Picard solutions unavailable"};
    double worst = 0.0;
    std::string where;
    for (std::size_t k = 0; k < configs.size(); ++k) {
      const ExposurePath ode = solve_exposure_ode(configs[k], picard[k].grid);
      double d = 0.0;
      for (std::size_t i = 0; i < ode.pi_tilde.size(); ++i) {
        d = std::max(d, std::abs(ode.pi_tilde[i] - picard[k].pi_tilde[i]));
      }
      if (d >= worst) {
        worst = d;
        where = label(configs[k]);
      }
    }
    return Outcome{worst < 1e-6, fmt("max sup-norm %.3g at %s (limit 1e-6)", worst, where.c_str())};
  });

  report(4, "variance nonnegativity", [&] {
    std::size_t violations = 0;
    std::size_t strict_failures = 0;
    for (const ExposurePath& p : picard) {
      for (std::size_t i = 0; i < p.a.size(); ++i) {
        if (p.f[i] < p.a[i] * p.a[i]) ++violations;
        if (i + 1 < p.a.size() && !(p.f[i] > p.a[i] * p.a[i])) ++strict_failures;
      }
    }
    std::size_t equality_failures = 0;
    for (const ModelConfig& cfg : grid_configs(true)) {
      const ExposurePath p = solve_exposure_picard(cfg, TimeGrid(cfg.horizon, 1000));
      for (std::size_t i = 0; i < p.a.size(); ++i) {
        if (p.f[i] != p.a[i] * p.a[i]) ++equality_failures;
      }
    }
    return Outcome{!picard.empty() && violations == 0 && strict_failures == 0 && equality_failures == 0,
                   fmt("f<a^2 at %zu nodes; f=a^2 before T with mu>r at %zu nodes; f!=a^2 with mu=r at %zu nodes",
                       violations, strict_failures, equality_failures)};
  });

  const EquilibriumSolution p1_sol = solve_equilibrium(base);
  PathEnsemble ensemble;
  double mc_secs = 0.0;
  report(5, "moment reproduction", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    ensemble = simulate_paths(StrategySpec::equilibrium(p1_sol), base, HumanCapitalCurve::from(p1_sol),
                              mc(100000, 500), {0.0, base.x0});
    const MomentEstimate m = estimate_moments(ensemble, base.prefs.delta, 0.0);
    mc_secs = elapsed_since(t0);
    const TerminalMoments exact = expected_terminal_moments(0.0, base.x0, p1_sol);
    const double dy = std::abs(m.y - exact.first);
    const double dz = std::abs(m.z - exact.second);
    return Outcome{dy <= 3.0 * m.se_y && dz <= 3.0 * m.se_z && mc_secs < 60.0,
                   fmt("y=%.6f vs %.6f (%.2f SE), z=%.6f vs %.6f (%.2f SE), 1e5 paths %.1fs (limit 60s)", m.y,
                       exact.first, dy / m.se_y, m.z, exact.second, dz / m.se_z, mc_secs)};
  });

  report(6, "positivity of x + K", [&] {
    if (ensemble.size() == 0) return Outcome{false, "no ensemble"};
    const double lo = *std::min_element(ensemble.min_total_wealth.begin(), ensemble.min_total_wealth.end());
    return Outcome{lo > 0.0, fmt("min over %zu paths and all steps = %.6g", ensemble.size(), lo)};
  });

  report(7, "objective consistency", [&] {
    if (ensemble.size() == 0) return Outcome{false, "no ensemble"};
    const MomentEstimate m = estimate_moments(ensemble, base.prefs.delta, 0.0);
    const double psi = base.prefs.gamma / total_wealth(0.0, base.x0, p1_sol);
    const ObjectiveEstimate obj = estimate_objective(m, psi, base.prefs.beta);
    const double exact = value_function(0.0, base.x0, p1_sol);
    const double d = std::abs(obj.value - exact);
    return Outcome{d <= 3.0 * obj.se,
                   fmt("MC %.6f +- %.2g vs F(0,x0) = %.6f (%.2f SE)", obj.value, obj.se, exact, d / obj.se)};
  });

  report(8, "equilibrium falsification", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<EvalPoint> skipped;
    const auto points = default_points(p1_sol, &skipped);
    const EquilibriumReport rep = verify_equilibrium(points, PerturbationGrid{}, VerifierOptions{}, p1_sol,
                                                     mc(20000, 400));
    const double secs = elapsed_since(t0);
    bool null_zero = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const GapCell& c : rep.cells) {
      if (c.estimate.perturbation.null && c.estimate.gap != 0.0) null_zero = false;
      worst = std::min(worst, c.estimate.gap + rep.slack * c.estimate.h + 3.0 * c.estimate.se);
    }
    return Outcome{rep.all_pass() && null_zero && secs < 300.0,
                   fmt("%zu/%zu cells pass on %zu points (%zu infeasible skipped), null gaps zero: %s, "
                       "worst margin %.3g, %.1fs (limit 300s)",
                       rep.passed(), rep.cells.size(), points.size(), skipped.size(), null_zero ? "yes" : "no",
                       worst, secs)};
  });

  report(9, "FOC residual", [&] {
    double worst = 0.0;
    std::size_t checked = 0;
    for (const UtilitySpec& u : {UtilitySpec::logarithmic(), UtilitySpec::power(3.0), UtilitySpec::exponential(0.5)}) {
      ModelConfig cfg = base;
      cfg.utility = u;
      const EquilibriumSolution sol = solve_equilibrium(cfg);
      for (std::size_t i = 0; i < sol.policy.grid.size(); ++i) {
        if (sol.policy.clamped[i]) continue;
        const double m = sol.policy.m[i];
        worst = std::max(worst, std::abs(cfg.prefs.beta * marginal_utility(u, sol.policy.c_star[i]) - m) / std::abs(m));
        ++checked;
      }
    }
    return Outcome{worst <= 1e-10, fmt("max relative residual %.3g over %zu nodes (limit 1e-10)", worst, checked)};
  });

  report(10, "zero-premium regression", [&] {
    ModelConfig cfg = base;
    cfg.market.mu = cfg.market.r;
    cfg.allow_zero_premium = true;
    const EquilibriumSolution sol = solve_equilibrium(cfg);
    const bool flat = std::all_of(sol.exposure.pi_tilde.begin(), sol.exposure.pi_tilde.end(),
                                  [](double p) { return p == 0.0; });
    const PathEnsemble ens = simulate_paths(StrategySpec::equilibrium(sol), cfg, HumanCapitalCurve::from(sol),
                                            mc(100000, 500), {0.0, cfg.x0});
    const MomentEstimate m = estimate_moments(ens, cfg.prefs.delta, 0.0);
    const double var = sample_stats(ens.terminal_wealth).variance;

    PerturbationGrid grid;
    grid.include_null = false;
    grid.exposure_offsets = {-1.0, -0.5, 0.5, 1.0};
    grid.consumption_offsets.clear();
    const EquilibriumReport rep = verify_equilibrium({{0.0, cfg.x0}}, grid, VerifierOptions{}, sol, mc(100000, 400));
    std::size_t positive = 0;
    double smallest = std::numeric_limits<double>::infinity();
    double weakest = std::numeric_limits<double>::infinity();
    for (const GapCell& c : rep.cells) {
      if (c.estimate.gap > 0.0) ++positive;
      smallest = std::min(smallest, c.estimate.gap);
      weakest = std::min(weakest, c.estimate.gap / c.estimate.se);
    }
    return Outcome{flat && var == 0.0 && m.se_y == 0.0 && rep.complete && positive == rep.cells.size(),
                   fmt("pi_tilde==0: %s, terminal variance %.3g, %zu/%zu exposure gaps > 0 (min %.3g, min gap/SE %.2f)",
                       flat ? "yes" : "no", var, positive, rep.cells.size(), smallest, weakest)};
  });

  report(11, "convergence order", [&] {
    PicardOptions tight;
    tight.tol = 1e-13;
    std::vector<ExposurePath> runs;
    for (std::size_t n : {250, 500, 1000}) runs.push_back(solve_exposure_picard(base, TimeGrid(1.0, n), tight));
    auto diff = [](const ExposurePath& coarse, const ExposurePath& fine) {
      double d = 0.0;
      for (std::size_t i = 0; i < coarse.pi_tilde.size(); ++i) {
        d = std::max(d, std::abs(coarse.pi_tilde[i] - fine.pi_tilde[2 * i]));
      }
      return d;
    };
    const double d1 = diff(runs[0], runs[1]);
    const double d2 = diff(runs[1], runs[2]);
    const double ratio = d1 / d2;
    return Outcome{ratio >= 3.0 && ratio <= 5.0,
                   fmt("|pi_250 - pi_500| = %.3g, |pi_500 - pi_1000| = %.3g, ratio %.3f (limits [3, 5])", d1, d2, ratio)};
  });

  std::printf("%s: %d of 11 criteria failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
  return failures == 0 ? 0 : 1;
}
