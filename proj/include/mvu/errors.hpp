#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mvu {

enum class ErrorCode {
  // configuration
  invalid_volatility,
  invalid_risk_premium,
  invalid_rate,
  invalid_gamma,
  invalid_beta,
  invalid_discount,
  invalid_horizon,
  invalid_wealth,
  invalid_utility,
  invalid_income,
  invalid_grid,
  invalid_argument,
  // numerics / model
  domain_error,
  no_consumption_root,
  condition_violation,
  non_convergence,
  simulation_failure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Rejected parameter or configuration value.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a utility or income function.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::domain_error, what) {}
};

/// x + K(t) <= 0: the equilibrium policy is undefined there.
class ConditionViolation : public Error {
 public:
  explicit ConditionViolation(const std::string& what)
      : Error(ErrorCode::condition_violation, what) {}
};

/// The consumption first-order condition has no positive root at some node.
class NoConsumptionRoot : public Error {
 public:
  NoConsumptionRoot(std::size_t node, double m_value, const std::string& what)
      : Error(ErrorCode::no_consumption_root, what), node_(node), m_(m_value) {}
  std::size_t node() const noexcept { return node_; }
  double m_value() const noexcept { return m_; }

 private:
  std::size_t node_;
  double m_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(int iterations, double residual, const std::string& what)
      : Error(ErrorCode::non_convergence, what),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class SimulationError : public Error {
 public:
  SimulationError(std::size_t path, const std::string& what)
      : Error(ErrorCode::simulation_failure, what), path_(path) {}
  std::size_t path() const noexcept { return path_; }

 private:
  std::size_t path_;
};

}  // namespace mvu
