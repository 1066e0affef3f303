#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stablim/acceptance.hpp"
#include "stablim/config.hpp"
#include "stablim/parallel.hpp"
#include "stablim/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate heavy-tailed time series and verify their stable limits"};
  app.require_subcommand(1);

  std::size_t threads = 0;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--threads", threads, "Worker threads (default: STABLIM_THREADS or all cores)");
  app.add_option("--out", out_dir, "Output directory (overrides the config and STABLIM_OUT)");
  app.add_option("--seed", seed, "Master seed, overrides the config");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "YAML experiment config")->required();
  auto* list = app.add_subcommand("list-models", "Print the model catalog");
  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  // Flags are accepted after the verb as well.
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : stablim::kExitUsage;
  }

  if (threads > 0) stablim::set_thread_count(threads);

  if (list->parsed()) {
    stablim::list_models(std::cout);
    return stablim::kExitPass;
  }
  if (selftest->parsed()) {
    bool all = true;
    for (const auto& r : stablim::run_acceptance(std::cout)) all = all && r.pass;
    return all ? stablim::kExitPass : stablim::kExitVerdictFailure;
  }
  if (run->parsed()) {
    stablim::ExperimentConfig config;
    try {
      config = stablim::load_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return stablim::kExitUsage;
    }
    if (seed) config.seed = *seed;
    if (out_dir.empty())
      if (const char* env = std::getenv("STABLIM_OUT"); env && *env) out_dir = env;
    return stablim::run_config(config, out_dir, std::cerr);
  }
  return stablim::kExitUsage;
}
