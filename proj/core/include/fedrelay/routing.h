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

#ifndef FEDRELAY_ROUTING_H_
#define FEDRELAY_ROUTING_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fedrelay/scenario.h"

namespace fedrelay {

// 0/1 adjacency of the transmission graph over all nodes (devices, then the
// access point). Entry (i, j) is 1 iff node i transmits to node j.
using IndicatorMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Each device's single outgoing link. next_hop[i] == num_devices() means the
// access point.
struct RoutingPlan {
  std::vector<std::size_t> next_hop;

  std::size_t num_devices() const { return next_hop.size(); }
  std::size_t access_point() const { return next_hop.size(); }
  bool operator==(const RoutingPlan&) const = default;
};

IndicatorMatrix indicator_from_powers(const Matrix& powers);
IndicatorMatrix indicator_from_plan(const RoutingPlan& plan);

// Reads the plan back from an indicator matrix. Returns nullopt when some
// device row does not hold exactly one link.
std::optional<RoutingPlan> plan_from_indicator(const IndicatorMatrix& indicator);

// Every device row sums to 1 and has a zero diagonal.
bool check_single_link(const IndicatorMatrix& indicator);

// At least one device transmits to the access point.
bool check_ap_connected(const IndicatorMatrix& indicator);

// Boolean-semiring power of the indicator with the access point made
// absorbing, raised to the number of devices.
IndicatorMatrix absorbing_reach(const IndicatorMatrix& indicator);

// Matrix whose only nonzero column is the access point's.
IndicatorMatrix all_paths_at_access_point(std::size_t nodes);

// Every device's route reaches the access point within |devices| hops.
bool check_acyclic_reach(const IndicatorMatrix& indicator);

// Time the device needs to produce its update, s_i / r^p_i.
std::vector<double> processing_times(const Scenario& scenario,
                                     const std::vector<double>& demand);

// Number of devices transmitting to each device.
std::vector<std::size_t> inflow_counts(const IndicatorMatrix& indicator);

// Per device, T^s_i + T^a_i * inflow_i + I^d / r_i - sum_j I_ij T^s_j for
// devices that relay through another device; nullopt for devices that
// transmit directly or not at all. Throws std::domain_error when a relayed
// device has no positive rate.
std::vector<std::optional<double>> timing_residuals(const IndicatorMatrix& indicator,
                                                    const std::vector<double>& demand,
                                                    const std::vector<double>& rates,
                                                    const Scenario& scenario);

// True per device when its relayed update arrives before the relay finishes
// processing (residual <= tolerance). Direct transmitters are always true.
std::vector<bool> check_timing(const IndicatorMatrix& indicator,
                               const std::vector<double>& demand,
                               const std::vector<double>& rates, const Scenario& scenario,
                               double tolerance = 0.0);

struct Violation {
  std::string constraint;             // single_link, self_loop, ap_connected, reach, timing
  std::optional<std::size_t> device;  // zero-based, when the violation is per device
  double magnitude = 0.0;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

FeasibilityReport feasible(const IndicatorMatrix& indicator, const std::vector<double>& demand,
                           const std::vector<double>& rates, const Scenario& scenario,
                           double tolerance = 0.0);

// One row per device in the "3 -> 7 -> N_D" format, devices 1-based. A
// route that revisits a device ends with "(cycle)".
std::string format_routing_table(const RoutingPlan& plan);

// Parses rows of the routing table; only the first hop of each row is
// needed, later hops are checked for consistency. Throws
// std::invalid_argument on malformed or contradictory input.
RoutingPlan parse_routing_table(std::string_view text, std::size_t num_devices);

// {"1": "N_D", "3": "7", ...}
nlohmann::json routing_to_json(const RoutingPlan& plan);
RoutingPlan routing_from_json(const nlohmann::json& j);

}  // namespace fedrelay

#endif  // FEDRELAY_ROUTING_H_
