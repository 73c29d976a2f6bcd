#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mvu/model.hpp"
#include "mvu/solver.hpp"

namespace mvu {

enum class StrategyMode { equilibrium, custom, perturbed };
enum class Scheme { exact_combined, euler_wealth };

std::string_view to_string(StrategyMode m);
std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);

/// Constant controls on [start, start + width): invest `wealth_fraction` of
/// current wealth in the stock and consume at `consumption`.
struct Spike {
  double start = 0.0;
  double width = 0.0;
  double wealth_fraction = 0.0;
  double consumption = 0.0;

  double end() const noexcept { return start + width; }
};

/// Deterministic-in-time strategy: dollar exposure exposure(s) * (X + K(s)),
/// consumption rate consumption(s), optionally overridden by a spike.
struct StrategySpec {
  std::function<double(double)> exposure;
  std::function<double(double)> consumption;
  StrategyMode mode = StrategyMode::custom;
  std::optional<Spike> spike;

  static StrategySpec equilibrium(const EquilibriumSolution& sol);
  static StrategySpec perturbed(const EquilibriumSolution& sol, const Spike& spike);
};

struct SimulationConfig {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 500;
  std::uint64_t seed = 20240601;
  Scheme scheme = Scheme::exact_combined;
  /// Brownian sub-increments per step; n_steps * substeps fixes the noise lattice,
  /// so (n, 2) and (2n, 1) see the same Brownian path.
  std::size_t substeps = 1;
  /// Worker threads; 0 = hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
  /// Extra times that must be simulation nodes (e.g. a spike end shared by a pair).
  std::vector<double> breakpoints;
};

struct StartState {
  double t = 0.0;
  double x = 1.0;
};

/// Human capital as a function of time, sampled on a solution grid.
struct HumanCapitalCurve {
  TimeGrid grid;
  std::vector<double> values;

  double operator()(double t) const { return grid.interpolate(values, t); }
  static HumanCapitalCurve from(const EquilibriumSolution& sol) {
    return {sol.policy.grid, sol.policy.K};
  }
};

struct PathEnsemble {
  StartState start;
  double horizon = 0.0;
  std::vector<double> terminal_wealth;
  std::vector<double> utility_integral;  // int_t^T e^{-rho (s - t)} U(c(s)) ds
  std::vector<double> min_total_wealth;  // min over nodes of X + K
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::exact_combined;
  std::size_t n_steps = 0;

  std::size_t size() const noexcept { return terminal_wealth.size(); }
};

/// Simulation nodes on [t, T]: uniform spacing near (T - t) / n_steps, with every
/// breakpoint in (t, T) placed exactly on a node.
std::vector<double> simulation_grid(double t, double horizon, std::size_t n_steps,
                                    std::span<const double> breakpoints);

PathEnsemble simulate_paths(const StrategySpec& strategy, const ModelConfig& cfg,
                            const HumanCapitalCurve& human_capital, const SimulationConfig& sim,
                            StartState start);

struct MomentEstimate {
  double y = 0.0;  // mean of e^{-delta (T-t)} X(T)
  double z = 0.0;  // mean of its square
  double w = 0.0;  // mean consumption-utility integral
  double se_y = 0.0;
  double se_z = 0.0;
  double se_w = 0.0;
  /// Sample covariance of (Y, Z, W) per path (not divided by n).
  std::array<std::array<double, 3>, 3> cov{};
  std::size_t n = 0;

  double variance() const noexcept { return z - y * y; }
};

MomentEstimate estimate_moments(const PathEnsemble& ensemble, double delta, double t);

struct ObjectiveEstimate {
  double value = 0.0;
  double se = 0.0;
};

/// y - (psi/2)(z - y^2) + beta w with a delta-method standard error.
ObjectiveEstimate estimate_objective(const MomentEstimate& m, double psi, double beta);

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

/// Shifted two-pass statistics: identical samples give exactly zero variance.
SampleStats sample_stats(std::span<const double> x);

}  // namespace mvu
