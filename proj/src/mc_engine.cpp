#include "mvu/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "mvu/rng.hpp"

namespace mvu {

std::string_view to_string(StrategyMode m) {
  switch (m) {
    case StrategyMode::equilibrium: return "equilibrium";
    case StrategyMode::custom: return "custom";
    case StrategyMode::perturbed: return "perturbed";
  }
  return "unknown";
}

std::string_view to_string(Scheme s) {
  return s == Scheme::exact_combined ? "exact-combined" : "euler-wealth";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "exact-combined" || name == "exact_combined") return Scheme::exact_combined;
  if (name == "euler-wealth" || name == "euler_wealth") return Scheme::euler_wealth;
  throw ValidationError(ErrorCode::invalid_argument, "unknown scheme '" + std::string(name) + "'");
}

StrategySpec StrategySpec::equilibrium(const EquilibriumSolution& sol) {
  StrategySpec s;
  s.exposure = [grid = sol.exposure.grid, pi = sol.exposure.pi_tilde](double t) {
    return grid.interpolate(pi, t);
  };
  s.consumption = [grid = sol.policy.grid, c = sol.policy.c_star](double t) {
    return grid.interpolate(c, t);
  };
  s.mode = StrategyMode::equilibrium;
  return s;
}

StrategySpec StrategySpec::perturbed(const EquilibriumSolution& sol, const Spike& spike) {
  StrategySpec s = equilibrium(sol);
  s.mode = StrategyMode::perturbed;
  s.spike = spike;
  return s;
}

std::vector<double> simulation_grid(double t, double horizon, std::size_t n_steps,
                                    std::span<const double> breakpoints) {
  if (n_steps < 1 || !(horizon > t)) {
    throw ValidationError(ErrorCode::invalid_grid, "simulation grid needs t < T and n_steps >= 1");
  }
  const double span = horizon - t;
  const double eps = 1e-12 * std::max(1.0, horizon);
  std::vector<double> cuts{t};
  std::vector<double> inner(breakpoints.begin(), breakpoints.end());
  std::sort(inner.begin(), inner.end());
  for (double b : inner) {
    if (b > t + eps && b < horizon - eps && b > cuts.back() + eps) cuts.push_back(b);
  }
  cuts.push_back(horizon);

  const double target = span / static_cast<double>(n_steps);
  std::vector<double> nodes{t};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::round((hi - lo) / target)));
    for (std::size_t j = 1; j < steps; ++j) {
      nodes.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(steps));
    }
    nodes.push_back(hi);
  }
  return nodes;
}

namespace {

// Per-step deterministic inputs shared by every path.
struct StepTable {
  std::vector<double> dt;
  std::vector<double> sqrt_sub_dt;    // sqrt(dt / substeps)
  std::vector<double> log_drift;      // exact-combined: int (r + (mu-r)pi - sigma^2 pi^2 / 2)
  std::vector<double> log_vol;        // exact-combined: sigma * rms(pi) over the step
  std::vector<double> exposure;       // euler: pi at the left node
  std::vector<double> net_income;     // euler: average of l - c over the step
  std::vector<unsigned char> spiked;  // euler: spike controls active on the step
  std::vector<double> K;              // human capital at every node
};

bool on_spike(const std::optional<Spike>& spike, double lo, double hi) {
  if (!spike) return false;
  const double eps = 1e-12 * std::max(1.0, spike->end());
  return lo >= spike->start - eps && hi <= spike->end() + eps;
}

double consumption_utility(const StrategySpec& strategy, const ModelConfig& cfg,
                           std::span<const double> nodes, double t0) {
  const double rho = cfg.prefs.rho;
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    const double lo = nodes[j];
    const double hi = nodes[j + 1];
    const bool spiked = on_spike(strategy.spike, lo, hi);
    const double c_lo = spiked ? strategy.spike->consumption : strategy.consumption(lo);
    const double c_hi = spiked ? strategy.spike->consumption : strategy.consumption(hi);
    total += 0.5 * (hi - lo) *
             (std::exp(-rho * (lo - t0)) * utility_value(cfg.utility, c_lo) +
              std::exp(-rho * (hi - t0)) * utility_value(cfg.utility, c_hi));
  }
  return total;
}

StepTable build_steps(const StrategySpec& strategy, const ModelConfig& cfg,
                      const HumanCapitalCurve& human_capital, const SimulationConfig& sim,
                      std::span<const double> nodes) {
  const std::size_t steps = nodes.size() - 1;
  const double r = cfg.market.r;
  const double excess = cfg.market.mu - cfg.market.r;
  const double sigma = cfg.market.sigma;
  StepTable tab;
  tab.dt.resize(steps);
  tab.sqrt_sub_dt.resize(steps);
  tab.K.resize(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) tab.K[j] = human_capital(nodes[j]);

  std::vector<double> pi(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    pi[j] = strategy.exposure(nodes[j]);
    if (!std::isfinite(pi[j])) {
      throw ValidationError(ErrorCode::invalid_argument, "strategy exposure is not finite");
    }
  }
  for (std::size_t j = 0; j < steps; ++j) {
    tab.dt[j] = nodes[j + 1] - nodes[j];
    tab.sqrt_sub_dt[j] = std::sqrt(tab.dt[j] / static_cast<double>(sim.substeps));
  }

  if (sim.scheme == Scheme::exact_combined) {
    tab.log_drift.resize(steps);
    tab.log_vol.resize(steps);
    for (std::size_t j = 0; j < steps; ++j) {
      const double mean_pi = 0.5 * (pi[j] + pi[j + 1]);
      const double mean_pi2 = 0.5 * (pi[j] * pi[j] + pi[j + 1] * pi[j + 1]);
      tab.log_drift[j] = (r + excess * mean_pi - 0.5 * sigma * sigma * mean_pi2) * tab.dt[j];
      tab.log_vol[j] = sigma * std::sqrt(mean_pi2);
    }
    return tab;
  }

  tab.exposure.assign(pi.begin(), pi.end() - 1);
  tab.net_income.resize(steps);
  tab.spiked.resize(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double lo = nodes[j];
    const double hi = nodes[j + 1];
    const bool spiked = on_spike(strategy.spike, lo, hi);
    tab.spiked[j] = spiked ? 1 : 0;
    const double c_lo = spiked ? strategy.spike->consumption : strategy.consumption(lo);
    const double c_hi = spiked ? strategy.spike->consumption : strategy.consumption(hi);
    if (c_lo < 0.0 || c_hi < 0.0) {
      throw ValidationError(ErrorCode::invalid_argument, "consumption must be nonnegative");
    }
    tab.net_income[j] =
        0.5 * (cfg.income.at(lo) + cfg.income.at(hi)) - 0.5 * (c_lo + c_hi);
  }
  return tab;
}

double brownian_increment(PathStream& rng, std::size_t substeps, double sqrt_sub_dt) {
  double sum = 0.0;
  for (std::size_t k = 0; k < substeps; ++k) sum += rng.normal();
  return sqrt_sub_dt * sum;
}

template <typename Body>
void parallel_paths(std::size_t n_paths, unsigned threads, Body body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_paths));
  if (workers <= 1) {
    body(std::size_t{0}, n_paths);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n_paths + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n_paths, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([=] { body(lo, hi); });
  }
}

}  // namespace

PathEnsemble simulate_paths(const StrategySpec& strategy, const ModelConfig& cfg,
                            const HumanCapitalCurve& human_capital, const SimulationConfig& sim,
                            StartState start) {
  if (sim.n_paths < 1 || sim.n_steps < 1 || sim.substeps < 1) {
    throw ValidationError(ErrorCode::invalid_argument,
                          "simulation needs n_paths, n_steps and substeps >= 1");
  }
  if (!strategy.exposure || !strategy.consumption) {
    throw ValidationError(ErrorCode::invalid_argument, "strategy is missing a control");
  }
  const double T = cfg.horizon;
  if (!(start.t >= 0.0 && start.t < T) || !std::isfinite(start.x)) {
    throw ValidationError(ErrorCode::invalid_argument, "start state must satisfy 0 <= t < T");
  }
  if (sim.scheme == Scheme::exact_combined && strategy.spike) {
    throw ValidationError(ErrorCode::invalid_argument,
                          "exact-combined scheme applies only to strategies without a spike");
  }

  std::vector<double> breaks = sim.breakpoints;
  if (strategy.spike) {
    if (!(strategy.spike->width > 0.0) || strategy.spike->end() > T + 1e-12 ||
        strategy.spike->consumption < 0.0) {
      throw ValidationError(ErrorCode::invalid_argument, "spike must lie inside [t, T]");
    }
    breaks.push_back(strategy.spike->start);
    breaks.push_back(strategy.spike->end());
  }
  const std::vector<double> nodes = simulation_grid(start.t, T, sim.n_steps, breaks);
  const StepTable tab = build_steps(strategy, cfg, human_capital, sim, nodes);
  const std::size_t steps = nodes.size() - 1;

  const double z0 = start.x + tab.K.front();
  if (sim.scheme == Scheme::exact_combined && !(z0 > 0.0)) {
    throw ConditionViolation("exact-combined scheme needs x + K(t) > 0, got " + std::to_string(z0));
  }

  PathEnsemble out;
  out.start = start;
  out.horizon = T;
  out.seed = sim.seed;
  out.scheme = sim.scheme;
  out.n_steps = steps;
  out.terminal_wealth.resize(sim.n_paths);
  out.min_total_wealth.resize(sim.n_paths);
  out.utility_integral.assign(sim.n_paths, consumption_utility(strategy, cfg, nodes, start.t));

  const double r = cfg.market.r;
  const double excess = cfg.market.mu - cfg.market.r;
  const double sigma = cfg.market.sigma;
  const std::size_t sub = sim.substeps;
  const double fraction = strategy.spike ? strategy.spike->wealth_fraction : 0.0;

  parallel_paths(sim.n_paths, sim.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      PathStream rng(sim.seed, p);
      if (sim.scheme == Scheme::exact_combined) {
        double log_z = std::log(z0);
        double min_log_z = log_z;
        for (std::size_t j = 0; j < steps; ++j) {
          const double dw = brownian_increment(rng, sub, tab.sqrt_sub_dt[j]);
          log_z += tab.log_drift[j] + tab.log_vol[j] * dw;
          min_log_z = std::min(min_log_z, log_z);
        }
        out.terminal_wealth[p] = std::exp(log_z) - tab.K.back();
        out.min_total_wealth[p] = std::exp(min_log_z);
      } else {
        double x = start.x;
        double min_z = x + tab.K.front();
        for (std::size_t j = 0; j < steps; ++j) {
          const double dw = brownian_increment(rng, sub, tab.sqrt_sub_dt[j]);
          const double dollars = tab.spiked[j] ? fraction * x : tab.exposure[j] * (x + tab.K[j]);
          x += (r * x + excess * dollars + tab.net_income[j]) * tab.dt[j] + sigma * dollars * dw;
          min_z = std::min(min_z, x + tab.K[j + 1]);
        }
        out.terminal_wealth[p] = x;
        out.min_total_wealth[p] = min_z;
      }
    }
  });

  for (std::size_t p = 0; p < sim.n_paths; ++p) {
    if (!std::isfinite(out.terminal_wealth[p]) || !std::isfinite(out.min_total_wealth[p])) {
      throw SimulationError(p, "non-finite wealth on path " + std::to_string(p));
    }
  }
  if (!std::isfinite(out.utility_integral.front())) {
    throw SimulationError(0, "non-finite consumption-utility integral");
  }
  return out;
}

SampleStats sample_stats(std::span<const double> x) {
  if (x.empty()) return {};
  const double shift = x.front();
  double sum = 0.0;
  for (double v : x) sum += v - shift;
  const double n = static_cast<double>(x.size());
  const double mean_dev = sum / n;
  double ss = 0.0;
  for (double v : x) {
    const double d = (v - shift) - mean_dev;
    ss += d * d;
  }
  return {shift + mean_dev, x.size() > 1 ? ss / (n - 1.0) : 0.0};
}

MomentEstimate estimate_moments(const PathEnsemble& ensemble, double delta, double t) {
  const std::size_t n = ensemble.size();
  if (n == 0) throw ValidationError(ErrorCode::invalid_argument, "empty ensemble");
  const double discount = std::exp(-delta * (ensemble.horizon - t));
  std::array<std::vector<double>, 3> cols;
  for (auto& c : cols) c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = discount * ensemble.terminal_wealth[i];
    cols[0][i] = y;
    cols[1][i] = y * y;
    cols[2][i] = ensemble.utility_integral[i];
  }
  MomentEstimate m;
  m.n = n;
  std::array<double, 3> mean{};
  for (int k = 0; k < 3; ++k) mean[k] = sample_stats(cols[k]).mean;
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (cols[a][i] - mean[a]) * (cols[b][i] - mean[b]);
      m.cov[a][b] = m.cov[b][a] = n > 1 ? s / denom : 0.0;
    }
  }
  const double rn = static_cast<double>(n);
  m.y = mean[0];
  m.z = mean[1];
  m.w = mean[2];
  m.se_y = std::sqrt(m.cov[0][0] / rn);
  m.se_z = std::sqrt(m.cov[1][1] / rn);
  m.se_w = std::sqrt(m.cov[2][2] / rn);
  return m;
}

ObjectiveEstimate estimate_objective(const MomentEstimate& m, double psi, double beta) {
  if (!std::isfinite(psi) || !(psi > 0.0)) {
    throw ValidationError(ErrorCode::invalid_argument, "psi must be finite and > 0");
  }
  const double value = m.y - 0.5 * psi * (m.z - m.y * m.y) + beta * m.w;
  const std::array<double, 3> grad{1.0 + psi * m.y, -0.5 * psi, beta};
  double var = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) var += grad[a] * m.cov[a][b] * grad[b];
  }
  const double n = static_cast<double>(std::max<std::size_t>(m.n, 1));
  return {value, std::sqrt(std::max(0.0, var) / n)};
}

}  // namespace mvu
