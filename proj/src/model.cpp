#include "mvu/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mvu {

namespace {

bool finite(double x) { return std::isfinite(x); }

// (1 - e^{-x}) / x for x >= 0, accurate near 0.
double one_minus_exp_over(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

// (1 - e^{-x}(1 + x)) / x^2, accurate near 0.
double second_moment_kernel(double x) {
  if (std::abs(x) < 1e-3) {
    return 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
  }
  return (-std::expm1(-x) - x * std::exp(-x)) / (x * x);
}

// Integral over [a, b] of e^{-r(s-a)} (c0 + c1 s) ds.
double discounted_affine(double a, double b, double r, double c0, double c1) {
  const double width = b - a;
  const double x = r * width;
  return (c0 + c1 * a) * width * one_minus_exp_over(x) +
         c1 * width * width * second_moment_kernel(x);
}

}  // namespace

std::string_view to_string(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::power: return "power";
    case UtilityKind::log: return "log";
    case UtilityKind::exponential: return "exponential";
  }
  return "unknown";
}

UtilityKind utility_kind_from_string(std::string_view name) {
  if (name == "power") return UtilityKind::power;
  if (name == "log") return UtilityKind::log;
  if (name == "exponential") return UtilityKind::exponential;
  throw ValidationError(ErrorCode::invalid_utility,
                        "unknown utility kind '" + std::string(name) + "'");
}

double utility_value(const UtilitySpec& u, double c) {
  switch (u.kind) {
    case UtilityKind::log:
      if (!(c > 0.0)) throw DomainError("log utility requires c > 0");
      return std::log(c);
    case UtilityKind::power:
      if (!(c >= 0.0)) throw DomainError("power utility requires c >= 0");
      if (c == 0.0 && u.eta > 1.0) {
        throw DomainError("power utility with eta > 1 is unbounded below at c = 0");
      }
      return std::pow(c, 1.0 - u.eta) / (1.0 - u.eta);
    case UtilityKind::exponential:
      if (!(c >= 0.0)) throw DomainError("exponential utility requires c >= 0");
      return -std::exp(-u.eta * c) / u.eta;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double marginal_utility(const UtilitySpec& u, double c) {
  switch (u.kind) {
    case UtilityKind::log:
      if (!(c > 0.0)) throw DomainError("log marginal utility requires c > 0");
      return 1.0 / c;
    case UtilityKind::power:
      if (!(c > 0.0)) throw DomainError("power marginal utility requires c > 0");
      return std::pow(c, -u.eta);
    case UtilityKind::exponential:
      if (!(c >= 0.0)) throw DomainError("exponential marginal utility requires c >= 0");
      return std::exp(-u.eta * c);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

InverseMarginal marginal_utility_inverse(const UtilitySpec& u, double y) {
  if (!(y > 0.0) || !finite(y)) {
    throw DomainError("inverse marginal utility requires a finite y > 0, got " +
                      std::to_string(y));
  }
  switch (u.kind) {
    case UtilityKind::log:
      return {1.0 / y, false};
    case UtilityKind::power:
      return {std::pow(y, -1.0 / u.eta), false};
    case UtilityKind::exponential:
      // U'(0) = 1; anything above needs negative consumption.
      if (y > 1.0) return {0.0, true};
      return {-std::log(y) / u.eta, false};
  }
  return {std::numeric_limits<double>::quiet_NaN(), false};
}

std::string_view to_string(IncomeKind kind) {
  switch (kind) {
    case IncomeKind::constant: return "constant";
    case IncomeKind::linear: return "linear";
    case IncomeKind::exponential_decay: return "exponential_decay";
    case IncomeKind::tabulated: return "tabulated";
  }
  return "unknown";
}

IncomeKind income_kind_from_string(std::string_view name) {
  if (name == "constant") return IncomeKind::constant;
  if (name == "linear") return IncomeKind::linear;
  if (name == "exponential_decay" || name == "exponential-decay") {
    return IncomeKind::exponential_decay;
  }
  if (name == "tabulated") return IncomeKind::tabulated;
  throw ValidationError(ErrorCode::invalid_income,
                        "unknown income kind '" + std::string(name) + "'");
}

IncomeProfile IncomeProfile::constant(double level, double horizon) {
  IncomeProfile p;
  p.kind_ = IncomeKind::constant;
  p.horizon_ = horizon;
  p.p0_ = level;
  p.p1_ = level;
  return p;
}

IncomeProfile IncomeProfile::linear(double start, double end, double horizon) {
  IncomeProfile p;
  p.kind_ = IncomeKind::linear;
  p.horizon_ = horizon;
  p.p0_ = start;
  p.p1_ = end;
  return p;
}

IncomeProfile IncomeProfile::exponential_decay(double initial, double rate, double horizon) {
  IncomeProfile p;
  p.kind_ = IncomeKind::exponential_decay;
  p.horizon_ = horizon;
  p.p0_ = initial;
  p.p1_ = rate;
  return p;
}

IncomeProfile IncomeProfile::tabulated(std::vector<double> times, std::vector<double> values) {
  IncomeProfile p;
  p.kind_ = IncomeKind::tabulated;
  p.horizon_ = times.empty() ? 0.0 : times.back();
  p.times_ = std::move(times);
  p.values_ = std::move(values);
  return p;
}

void IncomeProfile::validate() const {
  auto fail = [](const std::string& msg) {
    throw ValidationError(ErrorCode::invalid_income, msg);
  };
  if (!(horizon_ > 0.0) || !finite(horizon_)) fail("income horizon must be positive");
  switch (kind_) {
    case IncomeKind::constant:
      if (!finite(p0_) || p0_ < 0.0) fail("constant income must be finite and >= 0");
      break;
    case IncomeKind::linear:
      if (!finite(p0_) || !finite(p1_) || p0_ < 0.0 || p1_ < 0.0) {
        fail("linear income endpoints must be finite and >= 0");
      }
      break;
    case IncomeKind::exponential_decay:
      if (!finite(p0_) || !finite(p1_) || p0_ < 0.0) {
        fail("exponential-decay income needs a finite initial level >= 0 and finite rate");
      }
      break;
    case IncomeKind::tabulated:
      if (times_.size() < 2 || times_.size() != values_.size()) {
        fail("tabulated income needs >= 2 samples with matching times and values");
      }
      if (times_.front() != 0.0) fail("tabulated income must start at t = 0");
      for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!finite(times_[i]) || !finite(values_[i]) || values_[i] < 0.0) {
          fail("tabulated income samples must be finite and >= 0");
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
          fail("tabulated income times must be strictly increasing");
        }
      }
      break;
  }
}

double IncomeProfile::at(double t) const {
  // Allow a few ulps of slack at the ends for grid nodes computed as i*T/n.
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, horizon_);
  if (!(t >= -slack && t <= horizon_ + slack)) {
    throw DomainError("income requested at t = " + std::to_string(t) + " outside [0, " +
                      std::to_string(horizon_) + "]");
  }
  t = std::clamp(t, 0.0, horizon_);
  switch (kind_) {
    case IncomeKind::constant:
      return p0_;
    case IncomeKind::linear:
      return p0_ + (p1_ - p0_) * (t / horizon_);
    case IncomeKind::exponential_decay:
      return p0_ * std::exp(-p1_ * t);
    case IncomeKind::tabulated: {
      auto it = std::upper_bound(times_.begin(), times_.end(), t);
      if (it == times_.end()) return values_.back();
      const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
      return values_[lo] + w * (values_[hi] - values_[lo]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double IncomeProfile::discounted_integral(double from, double to, double r) const {
  if (to <= from) return 0.0;
  at(from);
  at(to);
  switch (kind_) {
    case IncomeKind::constant:
      return discounted_affine(from, to, r, p0_, 0.0);
    case IncomeKind::linear: {
      const double slope = (p1_ - p0_) / horizon_;
      return discounted_affine(from, to, r, p0_, slope);
    }
    case IncomeKind::exponential_decay: {
      const double width = to - from;
      return p0_ * std::exp(-p1_ * from) * width * one_minus_exp_over((r + p1_) * width);
    }
    case IncomeKind::tabulated: {
      double total = 0.0;
      double lo = from;
      for (std::size_t i = 1; i < times_.size() && lo < to; ++i) {
        if (times_[i] <= lo) continue;
        const double hi = std::min(to, times_[i]);
        const double slope = (values_[i] - values_[i - 1]) / (times_[i] - times_[i - 1]);
        const double intercept = values_[i - 1] - slope * times_[i - 1];
        // Re-anchor the discount at `from`.
        total += std::exp(-r * (lo - from)) * discounted_affine(lo, hi, r, intercept, slope);
        lo = hi;
      }
      if (lo < to) total += std::exp(-r * (lo - from)) * discounted_affine(lo, to, r, values_.back(), 0.0);
      return total;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double income_at(const IncomeProfile& p, double t) { return p.at(t); }

void validate(const ModelConfig& cfg) {
  const auto& m = cfg.market;
  const auto& p = cfg.prefs;
  if (!finite(m.sigma) || !(m.sigma > 0.0)) {
    throw ValidationError(ErrorCode::invalid_volatility, "sigma must be > 0");
  }
  if (!finite(m.r) || !(m.r > 0.0)) {
    throw ValidationError(ErrorCode::invalid_rate, "r must be > 0");
  }
  if (!finite(m.mu) || m.mu < m.r || (m.mu == m.r && !cfg.allow_zero_premium)) {
    throw ValidationError(ErrorCode::invalid_risk_premium,
                          cfg.allow_zero_premium ? "mu must be >= r" : "mu must be > r");
  }
  if (!finite(p.gamma) || !(p.gamma > 0.0)) {
    throw ValidationError(ErrorCode::invalid_gamma, "gamma must be > 0");
  }
  if (!finite(p.beta) || !(p.beta > 0.0)) {
    throw ValidationError(ErrorCode::invalid_beta, "beta must be > 0");
  }
  if (!finite(p.delta) || !finite(p.rho) || p.delta < 0.0 || p.rho < 0.0) {
    throw ValidationError(ErrorCode::invalid_discount, "delta and rho must be >= 0");
  }
  if (!finite(cfg.horizon) || !(cfg.horizon > 0.0)) {
    throw ValidationError(ErrorCode::invalid_horizon, "horizon T must be > 0");
  }
  if (!finite(cfg.x0) || !(cfg.x0 > 0.0)) {
    throw ValidationError(ErrorCode::invalid_wealth, "initial wealth x0 must be > 0");
  }
  const auto& u = cfg.utility;
  if (u.kind == UtilityKind::power && (!finite(u.eta) || !(u.eta > 0.0) || u.eta == 1.0)) {
    throw ValidationError(ErrorCode::invalid_utility,
                          "power utility needs eta > 0 and eta != 1 (use log for eta = 1)");
  }
  if (u.kind == UtilityKind::exponential && (!finite(u.eta) || !(u.eta > 0.0))) {
    throw ValidationError(ErrorCode::invalid_utility, "exponential utility needs eta > 0");
  }
  cfg.income.validate();
  if (std::abs(cfg.income.horizon() - cfg.horizon) > 1e-12 * cfg.horizon) {
    throw ValidationError(ErrorCode::invalid_income,
                          "income profile horizon does not match the model horizon");
  }
}

}  // namespace mvu
