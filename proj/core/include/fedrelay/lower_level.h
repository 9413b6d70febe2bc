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

#ifndef FEDRELAY_LOWER_LEVEL_H_
#define FEDRELAY_LOWER_LEVEL_H_

#include <vector>

#include "fedrelay/scenario.h"

namespace fedrelay {

using PriceVector = std::vector<double>;
using DemandVector = std::vector<double>;

// f(s) = a - b exp(-c s). Throws std::domain_error for s < 0.
double accuracy(const AccuracyModel& model, double s);

// Owner utility: sum_i [f_i(s_i) - q_i s_i].
double owner_utility(const Scenario& scenario, const DemandVector& demand,
                     const PriceVector& prices);

// Closed-form follower response for one device, clamped to [0, s_max]:
// (1/c) ln(c b / q). Throws std::domain_error for q <= 0.
double best_response_demand(const DeviceParams& device, double price);

DemandVector best_response_demand(const Scenario& scenario, const PriceVector& prices);

struct ConcavityCertificate {
  DemandVector demand;                   // s*(q) the Hessian is taken at
  std::vector<double> hessian_diagonal;  // -c^2 b exp(-c s); off-diagonals are 0
  bool negative_definite = false;
};

ConcavityCertificate concavity_certificate(const Scenario& scenario, const PriceVector& prices);

}  // namespace fedrelay

#endif  // FEDRELAY_LOWER_LEVEL_H_
