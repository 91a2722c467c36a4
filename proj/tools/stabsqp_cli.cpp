// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// stabsqp: run solves and certification studies from JSON configs.
//
//   stabsqp solve --config cfg.json [--out DIR] [--format csv|json|both] [--seed N]
//   stabsqp rate-study|error-bound|contrast --config cfg.json [--jobs N] ...
//   stabsqp list-instances
//
// Exit codes: 0 success, 1 configuration error, 2 MaxOuter, 3 subproblem
// failure, 4 study check failed.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "stabsqp/error.hpp"
#include "stabsqp_bench/config.hpp"
#include "stabsqp_bench/experiments.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_logger_mt("stabsqp");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::err);
  const char* env = std::getenv("STABSQP_LOG");
  if (!env) return;
  const std::string level(env);
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::warn("STABSQP_LOG={} not recognised (use error, info or debug)", level);
}

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
  cmd->add_option("--out", f.out, "Output directory (overrides output.dir)");
  cmd->add_option("--format", f.format, "Report format (overrides output.format)")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_option("--jobs", f.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Seed (overrides the config seed)");
}

int run(const std::string& kind, const Flags& f) {
  using namespace stabsqp::bench;
  try {
    ExperimentConfig config = load_config(f.config, kind);
    if (!f.out.empty()) config.output.dir = f.out;
    if (!f.format.empty()) config.output.format = format_from_string(f.format);
    if (f.seed) config.seed = *f.seed;
    spdlog::info("{} config hash {}", kind, config_hash(config));
    return run_experiment(config, RunOptions{f.jobs}, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::kConfigError;
  } catch (const stabsqp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"stabsqp: stabilized SQP solves and certification studies"};
  app.set_version_flag("--version", stabsqp::bench::version_string());
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char*, const char*> verbs[] = {
      {"solve", "Run one solve and write its trace"},
      {"rate-study", "Estimate convergence order from perturbed starts"},
      {"error-bound", "Tabulate sigma(v) / ||v - vbar|| around the reference point"},
      {"contrast", "Run stabilized and ordinary SQP from the same start"},
  };
  for (const auto& [name, help] : verbs) add_flags(app.add_subcommand(name, help), flags);
  app.add_subcommand("list-instances", "Print the instance catalog with default parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : stabsqp::bench::exit_code::kConfigError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  if (cmd->get_name() == "list-instances") {
    stabsqp::bench::list_instances(std::cout);
    return 0;
  }
  return run(cmd->get_name(), flags);
}
