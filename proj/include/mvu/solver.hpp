#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mvu/model.hpp"

namespace mvu {

/// Uniform grid t_i = i T / n on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
  /// Exact at both ends: node(0) == 0, node(steps()) == horizon().
  double node(std::size_t i) const noexcept;

  /// Linear interpolation of per-node values at time t in [0, T].
  double interpolate(std::span<const double> values, double t) const;

 private:
  double horizon_;
  std::size_t steps_;
};

/// Integral over [t_i, T] of the trapezoid interpolant of g, for every node.
std::vector<double> tail_trapezoid(const TimeGrid& grid, std::span<const double> g);

/// Integral over [t_i, T] of e^{-rate (s - t_i)} g(s) by composite trapezoid.
std::vector<double> discounted_tail_trapezoid(const TimeGrid& grid, std::span<const double> g,
                                              double rate);

enum class Convention { foc, theorem_literal };
enum class SolveMethod { picard, ode, both };

std::string_view to_string(Convention c);
std::string_view to_string(SolveMethod m);
Convention convention_from_string(std::string_view name);
SolveMethod method_from_string(std::string_view name);

struct ExposurePath {
  TimeGrid grid;
  std::vector<double> pi_tilde;  // dollar exposure per unit of x + K(t)
  std::vector<double> u;         // int_t^T [(r-delta) + (mu-r) pi + sigma^2 pi^2] ds
  std::vector<double> v;         // int_t^T sigma^2 pi^2 ds
  std::vector<double> a;
  std::vector<double> f;
  int iterations = 0;
  double residual = 0.0;
  double damping = 1.0;          // relaxation weight in effect at exit (Picard only)
};

struct PolicyPath {
  TimeGrid grid;
  std::vector<double> c_star;
  std::vector<double> K;
  std::vector<double> m;         // a + (gamma/2)(a^2 - f)
  std::vector<unsigned char> clamped;
  Convention convention = Convention::foc;

  std::size_t clamped_count() const;
};

struct EquilibriumSolution {
  ModelConfig config;
  ExposurePath exposure;
  PolicyPath policy;
  SolveMethod method = SolveMethod::picard;
  /// Sup-norm distance between the Picard and ODE exposures (method == both).
  std::optional<double> method_gap;

  double pi_tilde_at(double t) const { return exposure.grid.interpolate(exposure.pi_tilde, t); }
  double a_at(double t) const { return exposure.grid.interpolate(exposure.a, t); }
  double f_at(double t) const { return exposure.grid.interpolate(exposure.f, t); }
  double c_star_at(double t) const { return policy.grid.interpolate(policy.c_star, t); }
  double K_at(double t) const { return policy.grid.interpolate(policy.K, t); }
};

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 1.0;
  /// Switch to damping 0.5 after this many consecutive non-decreasing residuals (0 = never).
  int oscillation_window = 10;
};

struct SolverOptions {
  std::size_t steps = 1000;
  PicardOptions picard;
  SolveMethod method = SolveMethod::picard;
  Convention convention = Convention::foc;
};

/// Right-hand side of the fixed-point equation for the exposure, evaluated on the grid.
std::vector<double> exposure_map(const ModelConfig& cfg, const TimeGrid& grid,
                                 std::span<const double> pi_tilde);

/// sup_i |exposure_map(pi)_i - pi_i|
double fixed_point_residual(const ModelConfig& cfg, const TimeGrid& grid,
                            std::span<const double> pi_tilde);

ExposurePath solve_exposure_picard(const ModelConfig& cfg, const TimeGrid& grid,
                                   const PicardOptions& opts = {});

/// Classical RK4 backward from (u, v)(T) = (0, 0).
ExposurePath solve_exposure_ode(const ModelConfig& cfg, const TimeGrid& grid);

struct AuxFunctions {
  std::vector<double> a;
  std::vector<double> f;
};

/// a = exp(u - v), f = a^2 exp(v). Requires u(T) = v(T) = 0.
AuxFunctions compute_af(std::span<const double> u, std::span<const double> v);

struct ConsumptionPath {
  std::vector<double> m;
  std::vector<double> c_star;
  std::vector<unsigned char> clamped;
};

ConsumptionPath consumption_path(const ExposurePath& exposure, const ModelConfig& cfg,
                                 Convention convention = Convention::foc);

/// K(t_i) = int_{t_i}^T e^{-r(s - t_i)} (l(s) - c(s)) ds, K(T) = 0.
std::vector<double> human_capital(std::span<const double> c_star, const ModelConfig& cfg,
                                  const TimeGrid& grid);

EquilibriumSolution solve_equilibrium(const ModelConfig& cfg, const SolverOptions& opts = {});

/// Invested dollar amount pi*(t) x.
double dollar_policy(double t, double x, const EquilibriumSolution& sol);

double value_function(double t, double x, const EquilibriumSolution& sol);

struct TerminalMoments {
  double first = 0.0;   // E[e^{-delta (T-t)} X(T)]
  double second = 0.0;  // E[(e^{-delta (T-t)} X(T))^2]
};

TerminalMoments expected_terminal_moments(double t, double x, const EquilibriumSolution& sol);

/// Discounted utility of the equilibrium consumption over [t, T] under the active convention.
double consumption_utility_integral(double t, const EquilibriumSolution& sol);

/// x + K(t); throws ConditionViolation unless strictly positive.
double total_wealth(double t, double x, const EquilibriumSolution& sol);

}  // namespace mvu
