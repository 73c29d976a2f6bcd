#include <cmath>
#include <vector>

#include "doctest.h"
#include "mvu/model.hpp"

using namespace mvu;

namespace {

std::vector<UtilitySpec> all_utilities() {
  return {UtilitySpec::logarithmic(), UtilitySpec::power(2.0), UtilitySpec::power(0.5),
          UtilitySpec::power(5.0), UtilitySpec::exponential(1.0), UtilitySpec::exponential(0.1)};
}

ModelConfig p1() {
  ModelConfig cfg;
  cfg.market = {0.03, 0.08, 0.2};
  cfg.prefs = {2.0, 1.0, 0.0, 0.0};
  cfg.income = IncomeProfile::constant(0.2, 1.0);
  return cfg;
}

ErrorCode code_of(const ModelConfig& cfg) {
  try {
    validate(cfg);
  } catch (const ValidationError& e) {
    return e.code();
  }
  FAIL("expected a validation error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("utility_value examples") {
  CHECK(utility_value(UtilitySpec::logarithmic(), 1.0) == 0.0);
  CHECK(utility_value(UtilitySpec::power(2.0), 2.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(utility_value(UtilitySpec::exponential(1.0), 0.0) == -1.0);
}

TEST_CASE("utility_value domain errors") {
  CHECK_THROWS_AS(utility_value(UtilitySpec::logarithmic(), 0.0), DomainError);
  CHECK_THROWS_AS(utility_value(UtilitySpec::power(2.0), -1.0), DomainError);
  CHECK_THROWS_AS(utility_value(UtilitySpec::exponential(1.0), -0.1), DomainError);
  CHECK(utility_value(UtilitySpec::power(0.5), 0.0) == 0.0);
}

TEST_CASE("marginal_utility_inverse examples") {
  CHECK(marginal_utility_inverse(UtilitySpec::power(2.0), 4.0).rate == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(marginal_utility_inverse(UtilitySpec::logarithmic(), 2.0).rate == 0.5);
  CHECK(marginal_utility_inverse(UtilitySpec::exponential(1.0), std::exp(-1.0)).rate ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exponential inverse clamps at zero consumption") {
  const auto r = marginal_utility_inverse(UtilitySpec::exponential(1.0), 1.5);
  CHECK(r.rate == 0.0);
  CHECK(r.clamped);
  CHECK_FALSE(marginal_utility_inverse(UtilitySpec::exponential(1.0), 1.0).clamped);
  CHECK_THROWS_AS(marginal_utility_inverse(UtilitySpec::logarithmic(), 0.0), DomainError);
  CHECK_THROWS_AS(marginal_utility_inverse(UtilitySpec::power(2.0), -1.0), DomainError);
}

TEST_CASE("inverse marginal utility round-trips over a log-spaced grid") {
  for (const UtilitySpec& u : all_utilities()) {
    CAPTURE(to_string(u.kind));
    CAPTURE(u.eta);
    for (int k = 0; k <= 120; ++k) {
      const double c = std::pow(10.0, -6.0 + 0.1 * k);
      const double y = marginal_utility(u, c);
      // Representable domain: U'(c) must be a normal number distinguishable from U'(0).
      if (!std::isnormal(y) || y == 1.0) continue;
      const double back = marginal_utility_inverse(u, y).rate;
      CAPTURE(c);
      // -log(y)/eta loses digits as y -> 1; allow one rounding of log(y) in absolute terms.
      const double floor = u.kind == UtilityKind::exponential ? 1e-15 / u.eta : 0.0;
      CHECK(std::abs(back - c) <= 1e-10 * c + floor);
      CHECK(std::abs(marginal_utility(u, back) - y) <= 1e-12 * y);
    }
  }
}

TEST_CASE("utility is strictly increasing and concave") {
  for (const UtilitySpec& u : all_utilities()) {
    double prev = utility_value(u, 0.01);
    double prev_slope = marginal_utility(u, 0.01);
    for (double c = 0.02; c < 20.0; c *= 1.3) {
      const double cur = utility_value(u, c);
      CHECK(cur > prev);
      const double slope = marginal_utility(u, c);
      CHECK(slope < prev_slope);
      prev = cur;
      prev_slope = slope;
    }
  }
}

TEST_CASE("income_at examples") {
  CHECK(income_at(IncomeProfile::constant(1.0, 1.0), 0.5) == 1.0);
  CHECK(income_at(IncomeProfile::linear(2.0, 0.0, 1.0), 0.5) == 1.0);
  CHECK(income_at(IncomeProfile::tabulated({0.0, 1.0}, {1.0, 3.0}), 0.25) == 1.5);
  CHECK(income_at(IncomeProfile::exponential_decay(2.0, 0.5, 1.0), 1.0) ==
        doctest::Approx(2.0 * std::exp(-0.5)));
  CHECK_THROWS_AS(income_at(IncomeProfile::constant(1.0, 1.0), 1.5), DomainError);
  CHECK_THROWS_AS(income_at(IncomeProfile::constant(1.0, 1.0), -0.1), DomainError);
}

TEST_CASE("discounted income integral matches dense quadrature") {
  const double r = 0.05;
  const std::vector<IncomeProfile> profiles{
      IncomeProfile::constant(0.7, 2.0), IncomeProfile::linear(2.0, 0.5, 2.0),
      IncomeProfile::exponential_decay(1.5, 0.8, 2.0),
      IncomeProfile::tabulated({0.0, 0.5, 1.2, 2.0}, {1.0, 3.0, 0.5, 0.0})};
  for (const auto& p : profiles) {
    const double from = 0.3, to = 1.7;
    // Composite Simpson with 20000 panels.
    const int n = 20000;
    const double h = (to - from) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double t = from + i * h;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * std::exp(-r * (t - from)) * p.at(t);
    }
    s *= h / 3.0;
    CAPTURE(to_string(p.kind()));
    CHECK(p.discounted_integral(from, to, r) == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("config validation rejects each invalid field with its own code") {
  CHECK_NOTHROW(validate(p1()));
  auto with = [](auto mutate) {
    ModelConfig c = p1();
    mutate(c);
    return c;
  };
  CHECK(code_of(with([](ModelConfig& c) { c.market.sigma = 0.0; })) == ErrorCode::invalid_volatility);
  CHECK(code_of(with([](ModelConfig& c) { c.market.mu = c.market.r; })) == ErrorCode::invalid_risk_premium);
  CHECK(code_of(with([](ModelConfig& c) { c.market.mu = 0.01; })) == ErrorCode::invalid_risk_premium);
  CHECK(code_of(with([](ModelConfig& c) { c.prefs.gamma = 0.0; })) == ErrorCode::invalid_gamma);
  CHECK(code_of(with([](ModelConfig& c) { c.prefs.beta = -1.0; })) == ErrorCode::invalid_beta);
  CHECK(code_of(with([](ModelConfig& c) {
          c.horizon = 0.0;
        })) == ErrorCode::invalid_horizon);
  CHECK(code_of(with([](ModelConfig& c) { c.x0 = 0.0; })) == ErrorCode::invalid_wealth);
  CHECK(code_of(with([](ModelConfig& c) { c.market.r = 0.0; })) == ErrorCode::invalid_rate);
  CHECK(code_of(with([](ModelConfig& c) { c.utility = UtilitySpec::power(1.0); })) ==
        ErrorCode::invalid_utility);
  CHECK(code_of(with([](ModelConfig& c) { c.income = IncomeProfile::constant(-1.0, 1.0); })) ==
        ErrorCode::invalid_income);
  CHECK(code_of(with([](ModelConfig& c) { c.income = IncomeProfile::constant(1.0, 2.0); })) ==
        ErrorCode::invalid_income);
}

TEST_CASE("zero risk premium is admitted only when requested") {
  ModelConfig c = p1();
  c.market.mu = c.market.r;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.allow_zero_premium = true;
  CHECK_NOTHROW(validate(c));
  c.market.mu = 0.0;
  CHECK(code_of(c) == ErrorCode::invalid_risk_premium);
}
