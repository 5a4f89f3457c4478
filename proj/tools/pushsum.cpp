#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pushsum/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Average consensus over unreliable directed links"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Run a scenario and write its metric CSV");
  run->add_option("--config", config, "Scenario file")->required();
  run->add_option("--out", out, "CSV output path")->required();
  run->add_option("--set", overrides, "Override a config key, e.g. schedule.seed=3");

  auto* verify = app.add_subcommand("verify", "Check a scenario against the matrix oracle");
  verify->add_option("--config", config, "Scenario file")->required();
  verify->add_option("--set", overrides, "Override a config key");

  std::string param;
  std::vector<std::string> values;
  std::string out_dir;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sweep->add_option("--config", config, "Scenario file")->required();
  sweep->add_option("--param", param, "failure_probability, T, seed or n")->required();
  sweep->add_option("--values", values, "Comma-separated values")->delimiter(',');
  sweep->add_option("--out-dir", out_dir, "Output directory")->required();
  sweep->add_option("--set", overrides, "Override a config key");

  std::string name;
  auto* demo = app.add_subcommand("demo", "Run a built-in scenario");
  demo->add_option("--name", name, "reliable, lossy or diverging")->required();
  demo->add_option("--out", out, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : pushsum::cli::kExitConfig;
  }

  const pushsum::cli::Io io{std::cout, std::cerr};
  if (*run) return pushsum::cli::cmd_run(config, out, overrides, io);
  if (*verify) return pushsum::cli::cmd_verify(config, overrides, io);
  if (*sweep) return pushsum::cli::cmd_sweep(config, param, values, out_dir, overrides, io);
  return pushsum::cli::cmd_demo(name, out, io);
}
