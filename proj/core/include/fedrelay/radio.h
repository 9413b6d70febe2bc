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

#ifndef FEDRELAY_RADIO_H_
#define FEDRELAY_RADIO_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fedrelay/routing.h"
#include "fedrelay/scenario.h"

namespace fedrelay {

struct Link {
  std::size_t target = 0;  // node index; num_devices() is the access point
  double power = 0.0;
  bool operator==(const Link&) const = default;
};

// One (target, power) pair per device: the sparse form of the power matrix.
struct PowerAssignment {
  std::vector<Link> links;

  std::size_t num_devices() const { return links.size(); }
  Matrix matrix() const;
  RoutingPlan plan() const;
  bool operator==(const PowerAssignment&) const = default;
};

class RadioError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// w * log2(1 + signal / (interference + sigma2)).
double shannon_rate(double bandwidth, double signal, double interference, double sigma2);

// Rate of device i from the full power matrix, with co-relay interference:
// the total power received at i's target from every device aiming at that
// target, less i's own contribution. Throws RadioError when device i is
// silent or the SINR denominator is not positive.
double transmission_rate(std::size_t i, const Matrix& powers, const ChannelMatrix& H,
                         const Scenario& scenario);

// Rates of every device. Silent devices (all-zero power row) get 0, meaning
// "no transmission".
std::vector<double> transmission_rates(const Matrix& powers, const ChannelMatrix& H,
                                       const Scenario& scenario);

// Power received at `node` from every device targeting it except `exclude`.
double received_power(std::size_t node, const PowerAssignment& assignment,
                      const ChannelMatrix& H,
                      std::optional<std::size_t> exclude = std::nullopt);

// c^t_i * (I^d / r_i) * total power. Zero for a silent device; throws
// RadioError for a transmitting device with a non-positive rate.
double transmission_energy_cost(std::size_t i, double total_power, double rate,
                                const Scenario& scenario);

struct PowerForRate {
  double required = 0.0;  // unclamped power that meets the target exactly
  double power = 0.0;     // required clamped to [0, p_max]
  bool feasible = true;   // required <= p_max
};

// Inverse of the rate formula at fixed external interference:
// (2^{t/w} - 1) (J_ext + sigma2) / H_{i,target}.
PowerForRate min_power_for_rate(std::size_t i, std::size_t target, double target_rate,
                                double interference, const ChannelMatrix& H,
                                const Scenario& scenario);

}  // namespace fedrelay

#endif  // FEDRELAY_RADIO_H_
