#pragma once

#include <string_view>
#include <vector>

#include "mvu/errors.hpp"

namespace mvu {

struct MarketParams {
  double r = 0.03;      // risk-free rate, per year
  double mu = 0.08;     // stock drift, per year
  double sigma = 0.2;   // volatility, per sqrt-year
};

struct PreferenceParams {
  double gamma = 2.0;   // risk-aversion scale
  double beta = 1.0;    // weight of the consumption-utility term
  double delta = 0.0;   // discount rate applied to terminal wealth
  double rho = 0.0;     // discount rate applied to consumption utility
};

enum class UtilityKind { power, log, exponential };

/// Utility of consumption. power: c^(1-eta)/(1-eta), log: ln c,
/// exponential: -exp(-eta c)/eta.
struct UtilitySpec {
  UtilityKind kind = UtilityKind::log;
  double eta = 1.0;  // curvature; ignored for log

  static UtilitySpec power(double eta) { return {UtilityKind::power, eta}; }
  static UtilitySpec logarithmic() { return {UtilityKind::log, 1.0}; }
  static UtilitySpec exponential(double eta) { return {UtilityKind::exponential, eta}; }
};

std::string_view to_string(UtilityKind kind);
UtilityKind utility_kind_from_string(std::string_view name);

struct InverseMarginal {
  double rate = 0.0;
  bool clamped = false;  // exact inverse was negative and got clamped to 0
};

double utility_value(const UtilitySpec& u, double c);
double marginal_utility(const UtilitySpec& u, double c);
InverseMarginal marginal_utility_inverse(const UtilitySpec& u, double y);

enum class IncomeKind { constant, linear, exponential_decay, tabulated };

std::string_view to_string(IncomeKind kind);
IncomeKind income_kind_from_string(std::string_view name);

/// Deterministic labour-income rate l(t) on [0, horizon].
class IncomeProfile {
 public:
  IncomeProfile() = default;

  static IncomeProfile constant(double level, double horizon);
  /// Straight line from `start` at t = 0 to `end` at t = horizon.
  static IncomeProfile linear(double start, double end, double horizon);
  /// initial * exp(-rate * t)
  static IncomeProfile exponential_decay(double initial, double rate, double horizon);
  /// Piecewise-linear through (times[i], values[i]); times must span [0, horizon].
  static IncomeProfile tabulated(std::vector<double> times, std::vector<double> values);

  IncomeKind kind() const noexcept { return kind_; }
  double horizon() const noexcept { return horizon_; }
  double p0() const noexcept { return p0_; }
  double p1() const noexcept { return p1_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// l(t); throws DomainError outside [0, horizon].
  double at(double t) const;

  /// Integral of e^{-r(s - from)} l(s) ds over [from, to], closed form where available.
  double discounted_integral(double from, double to, double r) const;

  /// Throws ValidationError(invalid_income) on non-finite or negative rates.
  void validate() const;

 private:
  IncomeKind kind_ = IncomeKind::constant;
  double horizon_ = 1.0;
  double p0_ = 0.0;
  double p1_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

double income_at(const IncomeProfile& p, double t);

struct ModelConfig {
  MarketParams market;
  PreferenceParams prefs;
  UtilitySpec utility;
  IncomeProfile income = IncomeProfile::constant(0.0, 1.0);
  double horizon = 1.0;
  double x0 = 1.0;
  // Admit mu == r (zero risk premium) as a degenerate test configuration.
  bool allow_zero_premium = false;
};

/// Throws ValidationError with a code specific to the offending field.
void validate(const ModelConfig& cfg);

}  // namespace mvu
