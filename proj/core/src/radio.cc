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

#include "fedrelay/radio.h"

#include <cmath>
#include <numbers>
#include <string>

namespace fedrelay {
namespace {

struct RateTerms {
  Matrix H_I;  // H * I^T
  Matrix P_I;  // P * I^T
};

RateTerms rate_terms(const Matrix& powers, const ChannelMatrix& H) {
  const Matrix I = indicator_from_powers(powers).cast<double>();
  return {H * I.transpose(), powers * I.transpose()};
}

double rate_from_terms(std::size_t i, const Matrix& powers, const ChannelMatrix& H,
                       const RateTerms& terms, const Scenario& scenario) {
  const auto row = static_cast<Eigen::Index>(i);
  const double signal = H.row(row).dot(powers.row(row));
  if (!(signal > 0.0)) {
    throw RadioError("transmission_rate: device " + std::to_string(i + 1) + " is not transmitting");
  }
  const double received = terms.H_I.col(row).dot(terms.P_I.col(row));
  const double denominator = received - signal + scenario.sigma2;
  if (!(denominator > 0.0)) {
    throw RadioError("transmission_rate: non-positive SINR denominator for device " +
                     std::to_string(i + 1));
  }
  return scenario.devices[i].w * std::log1p(signal / denominator) / std::numbers::ln2;
}

}  // namespace

Matrix PowerAssignment::matrix() const {
  const auto nodes = static_cast<Eigen::Index>(links.size() + 1);
  Matrix P = Matrix::Zero(nodes, nodes);
  for (std::size_t i = 0; i < links.size(); ++i) {
    P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(links[i].target)) = links[i].power;
  }
  return P;
}

RoutingPlan PowerAssignment::plan() const {
  RoutingPlan plan;
  plan.next_hop.reserve(links.size());
  for (const auto& l : links) plan.next_hop.push_back(l.target);
  return plan;
}

double shannon_rate(double bandwidth, double signal, double interference, double sigma2) {
  const double denominator = interference + sigma2;
  if (!(denominator > 0.0)) throw RadioError("shannon_rate: non-positive SINR denominator");
  return bandwidth * std::log1p(signal / denominator) / std::numbers::ln2;
}

double transmission_rate(std::size_t i, const Matrix& powers, const ChannelMatrix& H,
                         const Scenario& scenario) {
  return rate_from_terms(i, powers, H, rate_terms(powers, H), scenario);
}

std::vector<double> transmission_rates(const Matrix& powers, const ChannelMatrix& H,
                                       const Scenario& scenario) {
  const RateTerms terms = rate_terms(powers, H);
  std::vector<double> rates(scenario.num_devices(), 0.0);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if ((powers.row(static_cast<Eigen::Index>(i)).array() > 0.0).any()) {
      rates[i] = rate_from_terms(i, powers, H, terms, scenario);
    }
  }
  return rates;
}

double received_power(std::size_t node, const PowerAssignment& assignment,
                      const ChannelMatrix& H, std::optional<std::size_t> exclude) {
  double total = 0.0;
  for (std::size_t k = 0; k < assignment.links.size(); ++k) {
    const auto& l = assignment.links[k];
    if (l.target != node || l.power <= 0.0 || (exclude && *exclude == k)) continue;
    total += H(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(node)) * l.power;
  }
  return total;
}

double transmission_energy_cost(std::size_t i, double total_power, double rate,
                                const Scenario& scenario) {
  if (total_power <= 0.0) return 0.0;
  if (!(rate > 0.0)) {
    throw RadioError("transmission_energy_cost: device " + std::to_string(i + 1) +
                     " transmits with non-positive rate");
  }
  return scenario.devices[i].c_t * (scenario.I_d / rate) * total_power;
}

PowerForRate min_power_for_rate(std::size_t i, std::size_t target, double target_rate,
                                double interference, const ChannelMatrix& H,
                                const Scenario& scenario) {
  const double gain = H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(target));
  if (!(target_rate > 0.0)) throw RadioError("min_power_for_rate: target rate must be > 0");
  if (!(gain > 0.0)) throw RadioError("min_power_for_rate: no channel to the target");
  const auto& d = scenario.devices[i];
  PowerForRate out;
  out.required = std::expm1(target_rate / d.w * std::numbers::ln2) *
                 (interference + scenario.sigma2) / gain;
  out.feasible = out.required <= d.p_max;
  out.power = out.feasible ? out.required : d.p_max;
  return out;
}

}  // namespace fedrelay
