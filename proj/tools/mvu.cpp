// mvu: solve, simulate, verify and sweep the mean-variance-utility equilibrium.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mvu/cli.hpp"

int main(int argc, char** argv) {
  using mvu::cli::Command;

  CLI::App app{"Equilibrium investment/consumption solver for mean-variance-utility portfolios"};
  app.require_subcommand(1);

  std::string config_path;
  mvu::cli::Overrides overrides;
  std::optional<std::string> out, convention, method;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory (overrides config and $MVU_OUTPUT_DIR)");
    sub->add_option("--seed", seed, "Monte Carlo seed");
    sub->add_option("--convention", convention, "consumption convention")
        ->check(CLI::IsMember({"foc", "theorem-literal"}));
    sub->add_option("--method", method, "exposure solver")
        ->check(CLI::IsMember({"picard", "ode", "both"}));
  };

  auto* solve = app.add_subcommand("solve", "solve for the equilibrium policy on a time grid");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo moments and objective under the equilibrium");
  auto* verify = app.add_subcommand("verify", "spike-perturbation equilibrium check");
  auto* sweep = app.add_subcommand("sweep", "solve across values of one parameter");
  for (auto* sub : {solve, simulate, verify, sweep}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mvu::cli::kValidationError;
  }

  overrides.out = out;
  overrides.seed = seed;
  overrides.convention = convention;
  overrides.method = method;

  Command cmd = Command::solve;
  if (simulate->parsed()) cmd = Command::simulate;
  else if (verify->parsed()) cmd = Command::verify;
  else if (sweep->parsed()) cmd = Command::sweep;

  return mvu::cli::run(cmd, config_path, overrides, std::cerr);
}
