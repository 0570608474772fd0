// lidc: batch front-end for the cascade library.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lidc/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate and analyse log-infinitely divisible multifractal cascades"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  app.add_option("--config", config_path, "Run configuration file (INI)");
  app.add_option("--seed", seed, "Global seed, overrides experiment.seed");
  app.add_option("--threads", threads, "Worker threads (0 = all cores), overrides experiment.threads");
  app.add_option("--out", out_dir, "Output directory, overrides output.directory");
  app.add_option("--format", format, "Output format, overrides output.format")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the effective configuration in canonical form and exit");

  for (const char* name : {"theory", "simulate", "verify", "estimate"}) app.add_subcommand(name)->fallthrough();
  app.get_subcommand("theory")->description("Write the closed-form diagnostics of the model");
  app.get_subcommand("simulate")->description("Write per-replica cell masses and a Z summary");
  app.get_subcommand("verify")->description("Run the configured invariant checks");
  app.get_subcommand("estimate")->description("Run the configured estimator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lidc::kExitOk : lidc::kExitConfig;
  }

  lidc::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = lidc::load_config(config_path);
    if (seed) cfg.experiment.seed = *seed;
    if (threads) cfg.experiment.threads = *threads;
    if (out_dir) cfg.output.directory = *out_dir;
    if (format) cfg.output.format = *format;
    lidc::validate(cfg);
  } catch (const lidc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lidc::kExitConfig;
  }
  if (print_config) {
    std::cout << lidc::serialize(cfg);
    return lidc::kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return lidc::kExitConfig;
  }
  return lidc::run_command(app.get_subcommands().front()->get_name(), cfg, std::cerr);
}
