#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "mvu/config.hpp"

namespace mvu::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kRuntimeFailure = 1,
  kValidationError = 2,
  kConvergenceFailure = 3,
  kVerificationFailure = 4,
};

enum class Command { solve, simulate, verify, sweep };

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> convention;
  std::optional<std::string> method;
};

/// Name of the environment variable that overrides output.dir (--out wins over it).
inline constexpr const char* kOutputDirEnv = "MVU_OUTPUT_DIR";

void apply_overrides(RunConfig& cfg, const Overrides& o);

/// Each runner writes its files under `out_dir` and returns an exit code.
/// Errors propagate as exceptions; run() maps them to codes.
int run_solve(const RunConfig& cfg, const std::filesystem::path& out_dir);
int run_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir);
int run_verify(const RunConfig& cfg, const std::filesystem::path& out_dir);
int run_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir);

nlohmann::json error_json(const std::exception& e);
int exit_code_for(const std::exception& e);

/// Full pipeline: load config, apply overrides, dispatch, catch and report errors
/// (error JSON on `err` and error.json in the output directory when possible).
int run(Command cmd, const std::string& config_path, const Overrides& overrides,
        std::ostream& err);

}  // namespace mvu::cli
