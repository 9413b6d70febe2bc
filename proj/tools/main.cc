// Copyright 2026 The fedrelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fedrelay: solve the pricing-and-relay Stackelberg game from the command line.
//
//   fedrelay validate --preset paper9 --seed 7 [--routing table.txt] [--profile report.json]
//   fedrelay solve    --preset paper9 --seed 7 --out results/ [--format csv|json|table]
//   fedrelay sweep    --preset paper9 --seed 7 --param c_a --values 0,0.005,0.01

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.h"

namespace {

using fedrelay::cli::RunConfig;

void add_common(CLI::App* cmd, RunConfig& config, std::string& format,
                std::string& m_schedule) {
  cmd->add_option("--scenario", config.scenario_path, "Scenario JSON file");
  cmd->add_option("--preset", config.preset, "Built-in scenario (paper9)");
  cmd->add_option("--random", config.random_devices, "Random scenario with this many devices");
  cmd->add_option("--seed", config.seed, "Seed for preset positions / random scenarios");
  cmd->add_option("--out", config.out_dir, "Output directory");
  cmd->add_option("--format", format, "Stdout format: csv, json or table")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  cmd->add_option("--eps-nash", config.eps_nash, "Tolerance on the best-response gain");
  cmd->add_option("--m-schedule", m_schedule,
                  "Comma-separated increasing penalty coefficients");
  cmd->add_option("--max-iter", config.max_iter, "Best-response rounds per penalty stage");
  cmd->add_flag("--no-order-check", config.no_order_check,
                "Skip the reverse-order robustness run");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = fedrelay::cli;

  CLI::App app{"Stackelberg pricing and cooperative-relay solver for federated learning"};
  app.require_subcommand(1);

  RunConfig config;
  std::string format = "table";
  std::string m_schedule;

  auto* validate = app.add_subcommand("validate", "Check a scenario (and optionally a routing)");
  add_common(validate, config, format, m_schedule);
  validate->add_option("--routing", config.routing_path, "Routing table to check");
  validate->add_option("--profile", config.profile_path, "report.json whose profile to check");

  auto* solve = app.add_subcommand("solve", "Compute the equilibrium and write artifacts");
  add_common(solve, config, format, m_schedule);

  cli::SweepSpec sweep_spec;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Solve once per value of a global parameter");
  add_common(sweep, config, format, m_schedule);
  sweep->add_option("--param", sweep_spec.parameter, "c_a, I_d, sigma2, alpha or h")->required();
  sweep->add_option("--values", values, "Comma-separated values (may be empty)")->required();
  sweep->add_option("--threads", sweep_spec.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitInvalidConfig;
  }

  try {
    config.format = cli::parse_format(format);
    if (!m_schedule.empty()) config.m_schedule = cli::parse_number_list(m_schedule);
    if (sweep->parsed()) sweep_spec.values = cli::parse_number_list(values);
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitInvalidConfig;
  }

  if (validate->parsed()) return cli::cmd_validate(config, std::cout, std::cerr);
  if (solve->parsed()) return cli::cmd_solve(config, std::cout, std::cerr);
  return cli::cmd_sweep(config, sweep_spec, std::cout, std::cerr);
}
