#include "mvu/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvu {

double perturbed_human_capital(double t, double h, double c_pert, const PolicyPath& policy,
                               const ModelConfig& cfg) {
  const double T = cfg.horizon;
  if (!(h > 0.0) || t + h > T + 1e-12 * T) {
    throw ValidationError(ErrorCode::invalid_argument, "spike must satisfy 0 < h <= T - t");
  }
  const double end = std::min(t + h, T);
  const double r = cfg.market.r;
  const double x = r * (end - t);
  const double annuity = std::abs(x) < 1e-8 ? (end - t) * (1.0 - 0.5 * x) : -std::expm1(-x) / r;
  const double spike = cfg.income.discounted_integral(t, end, r) - c_pert * annuity;
  return spike + std::exp(-x) * policy.grid.interpolate(policy.K, end);
}

namespace {

struct Leg {
  PathEnsemble ensemble;
  MomentEstimate moments;
  double psi = 0.0;
  double objective = 0.0;
};

SimulationConfig paired_config(const SimulationConfig& sim, double spike_end) {
  SimulationConfig out = sim;
  out.scheme = Scheme::euler_wealth;
  out.breakpoints.push_back(spike_end);
  return out;
}

Leg make_leg(PathEnsemble ensemble, double total_wealth, const EquilibriumSolution& sol,
             double t) {
  Leg leg{std::move(ensemble), {}, sol.config.prefs.gamma / total_wealth, 0.0};
  leg.moments = estimate_moments(leg.ensemble, sol.config.prefs.delta, t);
  leg.objective = estimate_objective(leg.moments, leg.psi, sol.config.prefs.beta).value;
  return leg;
}

Leg equilibrium_leg(EvalPoint point, double h, const EquilibriumSolution& sol,
                    const SimulationConfig& sim) {
  const double z = total_wealth(point.t, point.x, sol);
  PathEnsemble ens = simulate_paths(StrategySpec::equilibrium(sol), sol.config,
                                    HumanCapitalCurve::from(sol), paired_config(sim, point.t + h),
                                    {point.t, point.x});
  return make_leg(std::move(ens), z, sol, point.t);
}

// Per-path first-order influence of the objective estimator.
double influence(const Leg& leg, std::size_t i, double discount, double beta) {
  const double y = discount * leg.ensemble.terminal_wealth[i];
  const auto& m = leg.moments;
  return (1.0 + leg.psi * m.y) * (y - m.y) - 0.5 * leg.psi * (y * y - m.z) +
         beta * (leg.ensemble.utility_integral[i] - m.w);
}

GapEstimate paired_gap(EvalPoint point, const Perturbation& pert, const EquilibriumSolution& sol,
                       const SimulationConfig& sim, const Leg& reference) {
  const auto& cfg = sol.config;
  GapEstimate out;
  out.point = point;
  out.perturbation = pert;
  out.h = pert.h;
  out.objective_equilibrium = reference.objective;

  // The null perturbation re-simulates the equilibrium itself; with common random
  // numbers the two legs must coincide bit for bit.
  const double k_pert = pert.null
                            ? sol.K_at(point.t)
                            : perturbed_human_capital(point.t, pert.h, pert.c_pert, sol.policy, cfg);
  const double z_pert = point.x + k_pert;
  if (!(z_pert > 0.0)) {
    throw ConditionViolation("x + K under the perturbed consumption is " +
                             std::to_string(z_pert) + " <= 0");
  }
  const StrategySpec strategy =
      pert.null ? StrategySpec::equilibrium(sol)
                : StrategySpec::perturbed(sol, Spike{point.t, pert.h, pert.pi_pert, pert.c_pert});
  PathEnsemble ens = simulate_paths(strategy, cfg, HumanCapitalCurve::from(sol),
                                    paired_config(sim, point.t + pert.h), {point.t, point.x});
  const Leg perturbed = make_leg(std::move(ens), z_pert, sol, point.t);

  out.objective_perturbed = perturbed.objective;
  out.gap = (reference.objective - perturbed.objective) / pert.h;

  const std::size_t n = reference.ensemble.size();
  const double discount = std::exp(-cfg.prefs.delta * (cfg.horizon - point.t));
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = influence(reference, i, discount, cfg.prefs.beta) -
              influence(perturbed, i, discount, cfg.prefs.beta);
  }
  const SampleStats stats = sample_stats(diff);
  out.se = std::sqrt(stats.variance / static_cast<double>(n)) / pert.h;
  return out;
}

void check_spike(EvalPoint point, double h, const ModelConfig& cfg) {
  if (!(h > 0.0) || point.t + h > cfg.horizon + 1e-12 * cfg.horizon) {
    throw ValidationError(ErrorCode::invalid_argument,
                          "spike width h = " + std::to_string(h) + " does not fit in [t, T]");
  }
}

}  // namespace

GapEstimate equilibrium_gap(EvalPoint point, const Perturbation& pert,
                            const EquilibriumSolution& sol, const SimulationConfig& sim) {
  check_spike(point, pert.h, sol.config);
  const Leg reference = equilibrium_leg(point, pert.h, sol, sim);
  return paired_gap(point, pert, sol, sim, reference);
}

std::size_t EquilibriumReport::passed() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const GapCell& c) { return c.pass; }));
}

double EquilibriumReport::pass_rate() const {
  return cells.empty() ? 0.0 : static_cast<double>(passed()) / static_cast<double>(cells.size());
}

std::vector<EvalPoint> default_points(const EquilibriumSolution& sol,
                                      std::vector<EvalPoint>* skipped) {
  const double T = sol.config.horizon;
  const double x0 = sol.config.x0;
  std::vector<EvalPoint> points;
  for (double t : {0.0, 0.25 * T, 0.5 * T, 0.75 * T}) {
    for (double x : {0.5 * x0, x0, 2.0 * x0}) {
      if (x + sol.K_at(t) > 0.0) {
        points.push_back({t, x});
      } else if (skipped) {
        skipped->push_back({t, x});
      }
    }
  }
  return points;
}

std::vector<Perturbation> resolve_perturbations(const PerturbationGrid& grid, EvalPoint point,
                                                double h, const EquilibriumSolution& sol) {
  const double z = total_wealth(point.t, point.x, sol);
  const double pi_eq = sol.pi_tilde_at(point.t);
  const double c_eq = sol.c_star_at(point.t);
  const double to_wealth_fraction = z / point.x;
  std::vector<Perturbation> out;
  if (grid.include_null) out.push_back({c_eq, pi_eq * to_wealth_fraction, h, true});
  for (double d : grid.exposure_offsets) {
    out.push_back({c_eq, (pi_eq + d) * to_wealth_fraction, h, false});
  }
  for (double d : grid.consumption_offsets) {
    out.push_back({std::max(0.0, c_eq + d), pi_eq * to_wealth_fraction, h, false});
  }
  for (Perturbation p : grid.absolute) {
    p.h = h;
    out.push_back(p);
  }
  return out;
}

EquilibriumReport verify_equilibrium(const std::vector<EvalPoint>& points,
                                     const PerturbationGrid& perturbations,
                                     const VerifierOptions& opts, const EquilibriumSolution& sol,
                                     const SimulationConfig& sim) {
  if (points.empty() || opts.h_ladder.empty()) {
    throw ValidationError(ErrorCode::invalid_argument, "verifier needs points and an h ladder");
  }
  EquilibriumReport report;
  report.slack = opts.slack;
  for (const EvalPoint& point : points) {
    total_wealth(point.t, point.x, sol);
    for (double h : opts.h_ladder) check_spike(point, h, sol.config);
  }
  for (const EvalPoint& point : points) {
    for (double h : opts.h_ladder) {
      try {
        const Leg reference = equilibrium_leg(point, h, sol, sim);
        for (const Perturbation& pert : resolve_perturbations(perturbations, point, h, sol)) {
          GapCell cell{paired_gap(point, pert, sol, sim, reference), false};
          cell.pass = cell.estimate.gap >= -(opts.slack * h + 3.0 * cell.estimate.se);
          report.cells.push_back(cell);
        }
      } catch (const Error& e) {
        report.complete = false;
        report.abort_reason = e.what();
        return report;
      }
    }
  }
  return report;
}

}  // namespace mvu
