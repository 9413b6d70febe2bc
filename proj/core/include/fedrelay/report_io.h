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

#ifndef FEDRELAY_REPORT_IO_H_
#define FEDRELAY_REPORT_IO_H_

#include <nlohmann/json.hpp>

#include "fedrelay/scenario.h"
#include "fedrelay/upper_level.h"

namespace fedrelay {

nlohmann::json solver_config_to_json(const SolverConfig& config);

// Missing keys keep their defaults. Throws std::invalid_argument on
// mistyped values.
SolverConfig solver_config_from_json(const nlohmann::json& j, SolverConfig base = {});

nlohmann::json profile_to_json(const StrategyProfile& profile, std::size_t num_devices);
StrategyProfile profile_from_json(const nlohmann::json& j, std::size_t num_devices);

// The report embeds the scenario and the solver configuration, so a saved
// report can be re-verified on its own.
nlohmann::json report_to_json(const EquilibriumReport& report, const Scenario& scenario,
                              const SolverConfig& config);

struct LoadedReport {
  Scenario scenario;
  SolverConfig config;
  StrategyProfile profile;
  double max_unilateral_gain = 0.0;
  double final_m = 0.0;
  bool converged = false;
};

LoadedReport report_from_json(const nlohmann::json& j);

// Recomputes the best-response gain of a reloaded report at its final
// penalty coefficient.
double recompute_unilateral_gain(const LoadedReport& loaded);

}  // namespace fedrelay

#endif  // FEDRELAY_REPORT_IO_H_
