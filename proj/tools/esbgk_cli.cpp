#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "esbgk/config.hpp"
#include "esbgk/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ES-BGK polyatomic kinetic simulator and verification workbench"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  app.add_option("--config", config_path, "config file (flat key = value)");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "seed for random fields (overrides initial.seed and experiment.seed)");
  app.add_option("--threads", threads, "worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  const std::string names[] = {"simulate", "verify-linear", "dichotomy-sweep", "decay"};
  const std::string help[] = {"run the kinetic solver and write diagnostics",
                              "linear-theory check suite, JSON report",
                              "kernel dimension and split-mode response over theta",
                              "near-equilibrium decay run with exponential fit"};
  for (int i = 0; i < 4; ++i) app.add_subcommand(names[i], help[i])->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  esbgk::RunConfig config;
  try {
    if (!config_path.empty()) config = esbgk::load_config(config_path);
  } catch (const esbgk::ConfigError& e) {
    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path("out") : std::filesystem::path(out_dir);
    esbgk::write_failure(dir, command, 2, std::string("config error: ") + e.what());
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (seed) {
    config.initial.seed = *seed;
    config.experiment.seed = *seed;
  }
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  const std::filesystem::path dir = config.output_dir;
  try {
    if (command == "simulate") return esbgk::cmd_simulate(config, dir);
    if (command == "verify-linear") return esbgk::cmd_verify_linear(config, dir);
    if (command == "dichotomy-sweep") return esbgk::cmd_dichotomy_sweep(config, dir);
    return esbgk::cmd_decay(config, dir);
  } catch (const esbgk::GridError& e) {
    esbgk::write_failure(dir, command, 2, std::string("grid error: ") + e.what());
    return 2;
  } catch (const std::exception& e) {
    esbgk::write_failure(dir, command, 3, e.what());
    return 3;
  }
}
