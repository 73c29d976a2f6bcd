#include "mvu/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mvu {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (!std::isfinite(horizon) || !(horizon > 0.0)) {
    throw ValidationError(ErrorCode::invalid_grid, "grid horizon must be > 0");
  }
  if (steps < 2) {
    throw ValidationError(ErrorCode::invalid_grid, "grid needs at least 2 steps");
  }
}

double TimeGrid::node(std::size_t i) const noexcept {
  if (i >= steps_) return horizon_;
  return static_cast<double>(i) * horizon_ / static_cast<double>(steps_);
}

double TimeGrid::interpolate(std::span<const double> values, double t) const {
  if (values.size() != size()) {
    throw ValidationError(ErrorCode::invalid_argument, "interpolation values do not match grid");
  }
  const double slack = 1e-12 * horizon_;
  if (!(t >= -slack && t <= horizon_ + slack)) {
    throw DomainError("time " + std::to_string(t) + " outside the solution grid");
  }
  if (t >= horizon_) return values.back();
  if (t <= 0.0) return values.front();
  const double pos = t / dt();
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo >= steps_) lo = steps_ - 1;
  const double w = pos - static_cast<double>(lo);
  if (w == 0.0) return values[lo];
  return values[lo] + w * (values[lo + 1] - values[lo]);
}

std::vector<double> tail_trapezoid(const TimeGrid& grid, std::span<const double> g) {
  const std::size_t n = grid.steps();
  const double half = 0.5 * grid.dt();
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) out[i] = out[i + 1] + half * (g[i] + g[i + 1]);
  return out;
}

std::vector<double> discounted_tail_trapezoid(const TimeGrid& grid, std::span<const double> g,
                                              double rate) {
  const std::size_t n = grid.steps();
  const double half = 0.5 * grid.dt();
  const double step_discount = std::exp(-rate * grid.dt());
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    out[i] = step_discount * out[i + 1] + half * (g[i] + step_discount * g[i + 1]);
  }
  return out;
}

std::string_view to_string(Convention c) {
  return c == Convention::foc ? "foc" : "theorem-literal";
}

std::string_view to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::picard: return "picard";
    case SolveMethod::ode: return "ode";
    case SolveMethod::both: return "both";
  }
  return "unknown";
}

Convention convention_from_string(std::string_view name) {
  if (name == "foc") return Convention::foc;
  if (name == "theorem-literal" || name == "theorem_literal") return Convention::theorem_literal;
  throw ValidationError(ErrorCode::invalid_argument,
                        "unknown convention '" + std::string(name) + "'");
}

SolveMethod method_from_string(std::string_view name) {
  if (name == "picard") return SolveMethod::picard;
  if (name == "ode") return SolveMethod::ode;
  if (name == "both") return SolveMethod::both;
  throw ValidationError(ErrorCode::invalid_argument, "unknown method '" + std::string(name) + "'");
}

std::size_t PolicyPath::clamped_count() const {
  return static_cast<std::size_t>(std::count(clamped.begin(), clamped.end(), 1));
}

namespace {

struct Integrands {
  std::vector<double> growth;    // (r - delta) + (mu - r) pi + sigma^2 pi^2
  std::vector<double> variance;  // sigma^2 pi^2
};

Integrands integrands(const ModelConfig& cfg, std::span<const double> pi) {
  const double excess = cfg.market.mu - cfg.market.r;
  const double s2 = cfg.market.sigma * cfg.market.sigma;
  const double carry = cfg.market.r - cfg.prefs.delta;
  Integrands out{std::vector<double>(pi.size()), std::vector<double>(pi.size())};
  for (std::size_t i = 0; i < pi.size(); ++i) {
    out.variance[i] = s2 * pi[i] * pi[i];
    out.growth[i] = carry + excess * pi[i] + out.variance[i];
  }
  return out;
}

double exposure_scale(const ModelConfig& cfg) {
  const double s2 = cfg.market.sigma * cfg.market.sigma;
  return (cfg.market.mu - cfg.market.r) / (s2 * cfg.prefs.gamma);
}

// pi from the accumulated integrals; "+ 0.0" folds -0 into +0 when mu == r.
double exposure_from_integrals(double scale, double gamma, double u, double v) {
  return scale * (std::exp(-u) + gamma * std::exp(-v) - gamma) + 0.0;
}

double sup_distance(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

void fill_from_exposure(const ModelConfig& cfg, ExposurePath& path) {
  const Integrands g = integrands(cfg, path.pi_tilde);
  path.u = tail_trapezoid(path.grid, g.growth);
  path.v = tail_trapezoid(path.grid, g.variance);
  AuxFunctions af = compute_af(path.u, path.v);
  path.a = std::move(af.a);
  path.f = std::move(af.f);
}

}  // namespace

std::vector<double> exposure_map(const ModelConfig& cfg, const TimeGrid& grid,
                                 std::span<const double> pi_tilde) {
  if (pi_tilde.size() != grid.size()) {
    throw ValidationError(ErrorCode::invalid_argument, "exposure does not match grid");
  }
  const Integrands g = integrands(cfg, pi_tilde);
  const std::vector<double> u = tail_trapezoid(grid, g.growth);
  const std::vector<double> v = tail_trapezoid(grid, g.variance);
  const double scale = exposure_scale(cfg);
  std::vector<double> out(pi_tilde.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = exposure_from_integrals(scale, cfg.prefs.gamma, u[i], v[i]);
  }
  return out;
}

double fixed_point_residual(const ModelConfig& cfg, const TimeGrid& grid,
                            std::span<const double> pi_tilde) {
  return sup_distance(exposure_map(cfg, grid, pi_tilde), pi_tilde);
}

ExposurePath solve_exposure_picard(const ModelConfig& cfg, const TimeGrid& grid,
                                   const PicardOptions& opts) {
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    throw ValidationError(ErrorCode::invalid_argument, "Picard needs tol > 0 and max_iter >= 1");
  }
  ExposurePath path{grid, {}, {}, {}, {}, {}, 0, 0.0, opts.damping};
  std::vector<double> current(grid.size(), 1.0);
  double damping = opts.damping;
  double previous = std::numeric_limits<double>::infinity();
  int stalled = 0;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iter; ++it) {
    const std::vector<double> next = exposure_map(cfg, grid, current);
    residual = sup_distance(next, current);
    if (residual <= opts.tol) {
      path.pi_tilde = std::move(current);
      path.iterations = it;
      path.residual = residual;
      path.damping = damping;
      fill_from_exposure(cfg, path);
      return path;
    }
    stalled = residual >= previous ? stalled + 1 : 0;
    previous = residual;
    if (opts.oscillation_window > 0 && stalled >= opts.oscillation_window && damping > 0.5) {
      damping = 0.5;
      stalled = 0;
    }
    for (std::size_t i = 0; i < current.size(); ++i) {
      current[i] += damping * (next[i] - current[i]);
    }
  }
  throw ConvergenceError(opts.max_iter, residual,
                         "Picard iteration did not converge after " +
                             std::to_string(opts.max_iter) + " iterations (residual " +
                             std::to_string(residual) + ")");
}

ExposurePath solve_exposure_ode(const ModelConfig& cfg, const TimeGrid& grid) {
  const double excess = cfg.market.mu - cfg.market.r;
  const double s2 = cfg.market.sigma * cfg.market.sigma;
  const double carry = cfg.market.r - cfg.prefs.delta;
  const double gamma = cfg.prefs.gamma;
  const double scale = exposure_scale(cfg);

  // Rates of accumulation of (u, v) going backward in time.
  auto rates = [&](double u, double v) {
    const double pi = exposure_from_integrals(scale, gamma, u, v);
    const double var = s2 * pi * pi;
    return std::pair{carry + excess * pi + var, var};
  };

  const std::size_t n = grid.steps();
  const double h = grid.dt();
  ExposurePath path{grid, {}, std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0),
                    {}, {}, 0, 0.0, 1.0};
  for (std::size_t i = n; i-- > 0;) {
    const double u = path.u[i + 1];
    const double v = path.v[i + 1];
    const auto [ku1, kv1] = rates(u, v);
    const auto [ku2, kv2] = rates(u + 0.5 * h * ku1, v + 0.5 * h * kv1);
    const auto [ku3, kv3] = rates(u + 0.5 * h * ku2, v + 0.5 * h * kv2);
    const auto [ku4, kv4] = rates(u + h * ku3, v + h * kv3);
    path.u[i] = u + h / 6.0 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4);
    path.v[i] = v + h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
  }
  path.pi_tilde.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    path.pi_tilde[i] = exposure_from_integrals(scale, gamma, path.u[i], path.v[i]);
  }
  AuxFunctions af = compute_af(path.u, path.v);
  path.a = std::move(af.a);
  path.f = std::move(af.f);
  path.residual = fixed_point_residual(cfg, grid, path.pi_tilde);
  return path;
}

AuxFunctions compute_af(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) {
    throw ValidationError(ErrorCode::invalid_argument, "u and v must be non-empty and equal length");
  }
  if (u.back() != 0.0 || v.back() != 0.0) {
    throw ValidationError(ErrorCode::invalid_argument, "u(T) and v(T) must be zero");
  }
  AuxFunctions out{std::vector<double>(u.size()), std::vector<double>(u.size())};
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.a[i] = std::exp(u[i] - v[i]);
    // a*a*exp(v) so that v == 0 gives f == a^2 bit-for-bit.
    out.f[i] = out.a[i] * out.a[i] * std::exp(v[i]);
  }
  return out;
}

ConsumptionPath consumption_path(const ExposurePath& exposure, const ModelConfig& cfg,
                                 Convention convention) {
  const std::size_t n = exposure.a.size();
  const double gamma = cfg.prefs.gamma;
  const double scale = convention == Convention::foc ? 1.0 / cfg.prefs.beta : 1.0;
  ConsumptionPath out{std::vector<double>(n), std::vector<double>(n),
                      std::vector<unsigned char>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = exposure.a[i];
    const double f = exposure.f[i];
    const double m = a + 0.5 * gamma * (a * a - f);
    out.m[i] = m;
    if (!(m > 0.0)) {
      throw NoConsumptionRoot(i, m,
                              "consumption FOC has no positive root at node " + std::to_string(i) +
                                  " (t = " + std::to_string(exposure.grid.node(i)) +
                                  ", m = " + std::to_string(m) + ")");
    }
    const InverseMarginal c = marginal_utility_inverse(cfg.utility, m * scale);
    out.c_star[i] = c.rate;
    out.clamped[i] = c.clamped ? 1 : 0;
  }
  return out;
}

std::vector<double> human_capital(std::span<const double> c_star, const ModelConfig& cfg,
                                  const TimeGrid& grid) {
  if (c_star.size() != grid.size()) {
    throw ValidationError(ErrorCode::invalid_argument, "consumption does not match grid");
  }
  std::vector<double> net(grid.size());
  for (std::size_t i = 0; i < net.size(); ++i) net[i] = cfg.income.at(grid.node(i)) - c_star[i];
  return discounted_tail_trapezoid(grid, net, cfg.market.r);
}

EquilibriumSolution solve_equilibrium(const ModelConfig& cfg, const SolverOptions& opts) {
  validate(cfg);
  const TimeGrid grid(cfg.horizon, opts.steps);
  EquilibriumSolution sol{cfg, ExposurePath{grid, {}, {}, {}, {}, {}, 0, 0.0, 1.0},
                          PolicyPath{grid, {}, {}, {}, {}, opts.convention}, opts.method, {}};
  switch (opts.method) {
    case SolveMethod::picard:
      sol.exposure = solve_exposure_picard(cfg, grid, opts.picard);
      break;
    case SolveMethod::ode:
      sol.exposure = solve_exposure_ode(cfg, grid);
      break;
    case SolveMethod::both: {
      sol.exposure = solve_exposure_picard(cfg, grid, opts.picard);
      const ExposurePath ode = solve_exposure_ode(cfg, grid);
      sol.method_gap = sup_distance(sol.exposure.pi_tilde, ode.pi_tilde);
      break;
    }
  }
  ConsumptionPath consumption = consumption_path(sol.exposure, cfg, opts.convention);
  sol.policy.K = human_capital(consumption.c_star, cfg, grid);
  sol.policy.c_star = std::move(consumption.c_star);
  sol.policy.m = std::move(consumption.m);
  sol.policy.clamped = std::move(consumption.clamped);
  return sol;
}

double total_wealth(double t, double x, const EquilibriumSolution& sol) {
  const double z = x + sol.K_at(t);
  if (!(z > 0.0)) {
    throw ConditionViolation("x + K(t) = " + std::to_string(z) + " <= 0 at t = " +
                             std::to_string(t) + ", x = " + std::to_string(x));
  }
  return z;
}

double dollar_policy(double t, double x, const EquilibriumSolution& sol) {
  const double z = total_wealth(t, x, sol);
  const auto& cfg = sol.config;
  const double a = sol.a_at(t);
  const double f = sol.f_at(t);
  const double gamma = cfg.prefs.gamma;
  const double s2 = cfg.market.sigma * cfg.market.sigma;
  const double coefficient =
      (cfg.market.mu - cfg.market.r) / (s2 * gamma * f) * (a + gamma * (a * a - f));
  return coefficient * z;
}

double consumption_utility_integral(double t, const EquilibriumSolution& sol) {
  const auto& grid = sol.policy.grid;
  std::vector<double> utility(grid.size());
  for (std::size_t i = 0; i < utility.size(); ++i) {
    utility[i] = utility_value(sol.config.utility, sol.policy.c_star[i]);
  }
  const double rho = sol.config.prefs.rho;
  const std::vector<double> tail = discounted_tail_trapezoid(grid, utility, rho);
  const double relative = grid.interpolate(tail, t);
  return sol.policy.convention == Convention::foc ? relative : std::exp(-rho * t) * relative;
}

double value_function(double t, double x, const EquilibriumSolution& sol) {
  const double z = total_wealth(t, x, sol);
  const double a = sol.a_at(t);
  const double f = sol.f_at(t);
  const double gamma = sol.config.prefs.gamma;
  return a * z - 0.5 * gamma * (f - a * a) * z +
         sol.config.prefs.beta * consumption_utility_integral(t, sol);
}

TerminalMoments expected_terminal_moments(double t, double x, const EquilibriumSolution& sol) {
  const double z = total_wealth(t, x, sol);
  return {sol.a_at(t) * z, sol.f_at(t) * z * z};
}

}  // namespace mvu
