#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mvu/mc_engine.hpp"
#include "mvu/solver.hpp"

namespace mvu {

struct EvalPoint {
  double t = 0.0;
  double x = 1.0;
};

/// Spike deviation of width h. A null perturbation keeps the equilibrium
/// controls on the spike; c_pert/pi_pert then record their values at t.
struct Perturbation {
  double c_pert = 0.0;   // consumption rate on [t, t + h)
  double pi_pert = 0.0;  // fraction of current wealth held in the stock on [t, t + h)
  double h = 0.0;
  bool null = false;

  static Perturbation none(double h) { return {0.0, 0.0, h, true}; }
};

struct GapEstimate {
  double gap = 0.0;  // (f* - f_perturbed) / h
  double se = 0.0;
  double h = 0.0;
  Perturbation perturbation;
  EvalPoint point;
  double objective_equilibrium = 0.0;
  double objective_perturbed = 0.0;
};

/// Human capital at t when consumption is c_pert on [t, t + h) and c* afterwards.
double perturbed_human_capital(double t, double h, double c_pert, const PolicyPath& policy,
                               const ModelConfig& cfg);

/// Paired (common random numbers) estimate of the normalized objective gap. Both
/// strategies run on the euler-wealth scheme over the same grid and noise.
GapEstimate equilibrium_gap(EvalPoint point, const Perturbation& pert,
                            const EquilibriumSolution& sol, const SimulationConfig& sim);

/// Perturbations relative to the equilibrium at each point: exposure offsets in
/// units of x + K(t), consumption offsets as absolute rates (clamped at 0).
struct PerturbationGrid {
  bool include_null = true;
  std::vector<double> exposure_offsets{-0.2, 0.2};
  std::vector<double> consumption_offsets{-0.2, 0.2};
  /// Used verbatim at every point, in addition to the relative offsets.
  std::vector<Perturbation> absolute;
};

struct VerifierOptions {
  std::vector<double> h_ladder{0.1, 0.05, 0.025};
  double slack = 1.0;  // C in the pass rule gap >= -(C h + 3 se)
};

struct GapCell {
  GapEstimate estimate;
  bool pass = false;
};

struct EquilibriumReport {
  std::vector<GapCell> cells;
  std::vector<EvalPoint> skipped_points;  // default points with x + K(t) <= 0
  double slack = 1.0;
  bool complete = true;
  std::string abort_reason;

  std::size_t passed() const;
  double pass_rate() const;
  bool all_pass() const { return complete && passed() == cells.size(); }
};

/// t in {0, T/4, T/2, 3T/4} x x in {x0/2, x0, 2 x0}, keeping only points where
/// the equilibrium is defined (x + K(t) > 0); dropped points go to `skipped`.
std::vector<EvalPoint> default_points(const EquilibriumSolution& sol,
                                      std::vector<EvalPoint>* skipped = nullptr);

/// Resolve the grid into concrete perturbations at one point for one h.
std::vector<Perturbation> resolve_perturbations(const PerturbationGrid& grid, EvalPoint point,
                                                double h, const EquilibriumSolution& sol);

EquilibriumReport verify_equilibrium(const std::vector<EvalPoint>& points,
                                     const PerturbationGrid& perturbations,
                                     const VerifierOptions& opts, const EquilibriumSolution& sol,
                                     const SimulationConfig& sim);

}  // namespace mvu
