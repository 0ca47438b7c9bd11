// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "l0s/experiments.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 1;
constexpr int exit_runtime_error = 2;

std::string read_text_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw l0s::ConfigError("config: cannot read '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_registry()
{
  std::cout << "available experiments:\n";
  for (const auto& entry : l0s::experiment_registry()) {
    std::cout << "  " << entry.name << "\n      " << entry.summary << "\n";
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"l0s - hierarchical ray sampling experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool list = false;

  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
  run_cmd->add_option("config", config_path, "experiment config (JSON)");
  run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
  run_cmd->add_option("--seed", seed, "master seed (overrides config)");
  run_cmd->add_flag("--list", list, "list known experiments and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list) {
      print_registry();
      return exit_ok;
    }
    if (config_path.empty()) {
      throw l0s::ConfigError("config: path required (or use --list)");
    }
    l0s::ExperimentConfig cfg = l0s::validate(read_text_file(config_path));
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) cfg.seed = *seed;

    const l0s::ExperimentReport report = l0s::run(cfg);
    for (const auto& file : report.files) {
      std::cout << "wrote " << file.string() << "\n";
    }
    return exit_ok;
  } catch (const l0s::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime_error;
  }
}
