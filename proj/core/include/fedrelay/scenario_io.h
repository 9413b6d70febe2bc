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

#ifndef FEDRELAY_SCENARIO_IO_H_
#define FEDRELAY_SCENARIO_IO_H_

#include <filesystem>

#include <nlohmann/json.hpp>

#include "fedrelay/scenario.h"

namespace fedrelay {

// JSON layout:
//   {
//     "devices":   [{"c_p":..,"c_t":..,"r_p":..,"T_a":..,"w":..,
//                    "accuracy":{"a":..,"b":..,"c":..},
//                    "s_max":..,"q_max":..,"p_max":..}, ...],
//     "positions": [[x,y], ...],             // devices first, access point last
//     "global":    {"alpha":..,"sigma2":..,"I_d":..,"c_a":..,
//                   "h": <number> | [[...], ...]}
//   }
// s_max, q_max and p_max are optional per device (defaults: the demand cap
// at the price floor, c*b, and 10); "w" defaults to 1.
nlohmann::json scenario_to_json(const Scenario& scenario);

// Throws ScenarioError on missing or mistyped fields. Does not run the
// invariant checks; call validate() for that.
Scenario scenario_from_json(const nlohmann::json& j);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace fedrelay

#endif  // FEDRELAY_SCENARIO_IO_H_
