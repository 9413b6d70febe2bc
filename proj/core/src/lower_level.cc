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

#include "fedrelay/lower_level.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedrelay {

double accuracy(const AccuracyModel& m, double s) {
  if (!(s >= 0.0)) throw std::domain_error("accuracy: data size must be >= 0");
  return m.a - m.b * std::exp(-m.c * s);
}

double owner_utility(const Scenario& scenario, const DemandVector& demand,
                     const PriceVector& prices) {
  if (demand.size() != scenario.num_devices() || prices.size() != scenario.num_devices()) {
    throw std::invalid_argument("owner_utility: vector sizes do not match the device count");
  }
  double u = 0.0;
  for (std::size_t i = 0; i < demand.size(); ++i) {
    u += accuracy(scenario.devices[i].accuracy, demand[i]) - prices[i] * demand[i];
  }
  return u;
}

double best_response_demand(const DeviceParams& d, double price) {
  if (!(price > 0.0)) throw std::domain_error("best_response_demand: price must be > 0");
  const auto& acc = d.accuracy;
  // At or above c b the stationary point is at s <= 0.
  if (price >= acc.c * acc.b) return 0.0;
  const double s = std::log(acc.c * acc.b / price) / acc.c;
  return std::clamp(s, 0.0, d.s_max);
}

DemandVector best_response_demand(const Scenario& scenario, const PriceVector& prices) {
  DemandVector s(scenario.num_devices());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = best_response_demand(scenario.devices[i], prices.at(i));
  }
  return s;
}

ConcavityCertificate concavity_certificate(const Scenario& scenario, const PriceVector& prices) {
  ConcavityCertificate cert;
  cert.demand = best_response_demand(scenario, prices);
  cert.hessian_diagonal.resize(cert.demand.size());
  cert.negative_definite = true;
  for (std::size_t i = 0; i < cert.demand.size(); ++i) {
    const auto& acc = scenario.devices[i].accuracy;
    const double h = -acc.c * acc.c * acc.b * std::exp(-acc.c * cert.demand[i]);
    cert.hessian_diagonal[i] = h;
    if (!(h < 0.0)) cert.negative_definite = false;
  }
  return cert;
}

}  // namespace fedrelay
