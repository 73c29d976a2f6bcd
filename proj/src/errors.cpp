#include "mvu/errors.hpp"

namespace mvu {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_volatility: return "invalid_volatility";
    case ErrorCode::invalid_risk_premium: return "invalid_risk_premium";
    case ErrorCode::invalid_rate: return "invalid_rate";
    case ErrorCode::invalid_gamma: return "invalid_gamma";
    case ErrorCode::invalid_beta: return "invalid_beta";
    case ErrorCode::invalid_discount: return "invalid_discount";
    case ErrorCode::invalid_horizon: return "invalid_horizon";
    case ErrorCode::invalid_wealth: return "invalid_wealth";
    case ErrorCode::invalid_utility: return "invalid_utility";
    case ErrorCode::invalid_income: return "invalid_income";
    case ErrorCode::invalid_grid: return "invalid_grid";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::domain_error: return "domain_error";
    case ErrorCode::no_consumption_root: return "no_consumption_root";
    case ErrorCode::condition_violation: return "condition_violation";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::simulation_failure: return "simulation_failure";
  }
  return "unknown";
}

}  // namespace mvu
