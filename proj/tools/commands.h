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

#ifndef FEDRELAY_TOOLS_COMMANDS_H_
#define FEDRELAY_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedrelay/scenario.h"
#include "fedrelay/upper_level.h"

namespace fedrelay::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidConfig = 2,
  kExitNotConverged = 3,
};

enum class OutputFormat { kCsv, kJson, kTable };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // Exactly one scenario source.
  std::optional<std::filesystem::path> scenario_path;
  std::optional<std::string> preset;            // "paper9"
  std::optional<std::size_t> random_devices;    // random scenario with n devices
  std::optional<std::uint64_t> seed;            // required for preset and random

  std::optional<std::filesystem::path> out_dir;
  OutputFormat format = OutputFormat::kTable;

  // Overrides applied on top of the scenario file's optional "solver" block.
  std::optional<double> eps_nash;
  std::optional<std::vector<double>> m_schedule;
  std::optional<std::size_t> max_iter;
  bool no_order_check = false;

  // validate only: a routing table and/or a saved report to check.
  std::optional<std::filesystem::path> routing_path;
  std::optional<std::filesystem::path> profile_path;
};

struct LoadedRun {
  Scenario scenario;
  SolverConfig solver;
};

// Resolves the scenario source and the solver configuration. Throws
// ConfigError for an ambiguous or missing source, a missing seed, or a
// file that cannot be parsed. Does not check scenario invariants.
LoadedRun load_run(const RunConfig& config);

OutputFormat parse_format(const std::string& name);
std::vector<double> parse_number_list(const std::string& text);

// Bit-exact per-device schema: device_id,price,demand,rate,power,target,profit
std::string equilibrium_csv(const EquilibriumReport& report);
std::string format_number(double value);

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);

struct SweepSpec {
  std::string parameter;  // c_a, I_d, sigma2, alpha or h
  std::vector<double> values;
  std::size_t threads = 0;  // 0: hardware concurrency
};

// Copy of `scenario` with one global parameter replaced. Throws ConfigError
// for an unknown parameter name.
Scenario with_parameter(Scenario scenario, const std::string& parameter, double value);

struct SweepPoint {
  double value = 0.0;
  std::optional<EquilibriumReport> report;  // empty when the point was invalid
  std::string error;
};

// One independent solve per value, run concurrently, returned in input order.
std::vector<SweepPoint> run_sweep(const Scenario& base, const SolverConfig& solver,
                                  const SweepSpec& spec);
std::string sweep_csv(const std::string& parameter, const std::vector<SweepPoint>& points);

int cmd_sweep(const RunConfig& config, const SweepSpec& spec, std::ostream& out,
              std::ostream& err);

}  // namespace fedrelay::cli

#endif  // FEDRELAY_TOOLS_COMMANDS_H_
