#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvu/mc_engine.hpp"
#include "mvu/model.hpp"
#include "mvu/solver.hpp"
#include "mvu/verifier.hpp"

namespace mvu {

struct SimulateSettings {
  SimulationConfig sim;
  std::optional<StartState> start;  // defaults to (0, x0)
  bool dump_paths = false;
};

struct VerifySettings {
  std::size_t n_paths = 20000;
  std::size_t n_steps = 400;
  std::optional<std::vector<EvalPoint>> points;  // defaults to default_points()
  PerturbationGrid perturbations;
  VerifierOptions options;
};

struct SweepSpec {
  std::string parameter;  // gamma, beta, delta, rho, mu, sigma or r
  std::vector<double> values;
};

struct RunConfig {
  ModelConfig model;
  SolverOptions solver;
  SimulateSettings simulate;
  VerifySettings verify;
  std::optional<SweepSpec> sweep;
  std::string output_dir = "out";
  std::vector<std::string> formats{"csv", "json"};

  bool wants(const std::string& format) const;
};

/// Missing keys take their defaults; unknown keys and type mismatches throw
/// ValidationError. The model itself is validated separately by the runners.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

/// Every field, defaults included.
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const ModelConfig& cfg);

/// Set one sweepable parameter; throws ValidationError for unknown names.
void set_parameter(ModelConfig& cfg, const std::string& name, double value);

}  // namespace mvu
