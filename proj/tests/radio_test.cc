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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fedrelay/radio.h"
#include "fedrelay/upper_level.h"
#include "oracles.h"
#include "test_support.h"

namespace fedrelay {
namespace {

using testing::make_scenario;
using testing::plain_device;

// One device, unit gain to the access point: (1,3) at h = 10 is sqrt(10) away.
Scenario unit_gain_single() { return make_scenario({plain_device()}, {{1.0, 3.0}}); }

TEST(TransmissionRate, SinrOneGivesOneBit) {
  const auto s = unit_gain_single();
  const auto H = build_channel_matrix(s);
  PowerAssignment a{{{1, 1.0}}};  // H P = 1 = sigma^2
  EXPECT_NEAR(transmission_rate(0, a.matrix(), H, s), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(shannon_rate(1.0, 1.0, 0.0, 1.0), 1.0);
}

TEST(TransmissionRate, SilentDeviceHasNoRate) {
  const auto s = unit_gain_single();
  const auto H = build_channel_matrix(s);
  PowerAssignment a{{{1, 0.0}}};
  EXPECT_THROW(transmission_rate(0, a.matrix(), H, s), RadioError);
  EXPECT_EQ(transmission_rates(a.matrix(), H, s)[0], 0.0);
}

TEST(TransmissionRate, SharedRelayMatchesGroupingOracle) {
  // Two devices into device 2 with different gains, one direct.
  auto s = make_scenario({plain_device(), plain_device(), plain_device(), plain_device()},
                         {{1, 1}, {5, 5}, {4, 4}, {8, 1}});
  const auto H = build_channel_matrix(s);
  PowerAssignment a{{{2, 0.4}, {2, 3.0}, {4, 1.0}, {4, 2.5}}};
  const auto rates = transmission_rates(a.matrix(), H, s);
  const auto expected = oracle::grouped_rates(s, H, a);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(oracle::close_rel(rates[i], expected[i], 1e-12));
  // Co-relay interference lowers both rates below their solo values.
  EXPECT_LT(rates[0], shannon_rate(1.0, H(0, 2) * 0.4, 0.0, 1.0));
  EXPECT_LT(rates[1], shannon_rate(1.0, H(1, 2) * 3.0, 0.0, 1.0));
}

TEST(TransmissionRate, RandomInstancesMatchGroupingOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 4;  // 3 to 6 nodes
    auto s = random_scenario(n, static_cast<std::uint64_t>(trial));
    // Asymmetric raw gains.
    for (Eigen::Index r = 0; r < s.h.rows(); ++r) {
      for (Eigen::Index c = 0; c < s.h.cols(); ++c) s.h(r, c) = 1.0 + 20.0 * u(rng);
    }
    const auto H = build_channel_matrix(s);
    PowerAssignment a;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t t = static_cast<std::size_t>(u(rng) * static_cast<double>(n));
      if (t >= i) ++t;
      a.links.push_back({std::min(t, n), 1e-3 + 10.0 * u(rng)});
    }
    const auto rates = transmission_rates(a.matrix(), H, s);
    const auto expected = oracle::grouped_rates(s, H, a);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_TRUE(oracle::close_rel(rates[i], expected[i], 1e-12))
          << trial << " " << i << " " << rates[i] << " " << expected[i];
    }
  }
}

TEST(TransmissionRate, MonotoneInOwnAndCompetitorPower) {
  auto s = make_scenario({plain_device(), plain_device(), plain_device()}, {{1, 1}, {3, 2}, {6, 6}});
  const auto H = build_channel_matrix(s);
  double prev_own = 0.0;
  double prev_comp = 1e300;
  for (int k = 1; k <= 100; ++k) {
    const double p = 0.1 * k;
    PowerAssignment own{{{2, p}, {2, 1.0}, {3, 1.0}}};
    PowerAssignment comp{{{2, 1.0}, {2, p}, {3, 1.0}}};
    const double r_own = transmission_rate(0, own.matrix(), H, s);
    const double r_comp = transmission_rate(0, comp.matrix(), H, s);
    EXPECT_GT(r_own, prev_own);
    EXPECT_LT(r_comp, prev_comp);
    prev_own = r_own;
    prev_comp = r_comp;
  }
}

TEST(EnergyCost, Examples) {
  auto s = unit_gain_single();
  s.devices[0].c_t = 1.0;
  s.I_d = 1.0;
  EXPECT_EQ(transmission_energy_cost(0, 0.0, 0.0, s), 0.0);
  EXPECT_DOUBLE_EQ(transmission_energy_cost(0, 2.0, 1.0, s), 2.0);
  EXPECT_THROW(transmission_energy_cost(0, 1.0, 0.0, s), RadioError);
}

TEST(EnergyCost, PresetDeviceOneAtSolverOutput) {
  const auto s = paper_preset(7);
  Game game(s);
  SolverConfig cfg;
  cfg.order_check = false;
  const auto rep = game.solve_stackelberg(cfg);
  const double p = rep.profile.assignment.links[0].power;
  const double r = rep.rates[0];
  EXPECT_NEAR(rep.profit_terms[0].energy_cost, 58.0 * 0.1 / r * p, 1e-12);
}

TEST(MinPowerForRate, Examples) {
  const auto s = unit_gain_single();
  const auto H = build_channel_matrix(s);
  const auto one = min_power_for_rate(0, 1, 1.0, 0.0, H, s);
  EXPECT_NEAR(one.power, 1.0, 1e-15);
  EXPECT_TRUE(one.feasible);

  double prev = 1.0;
  for (double t = 1e-1; t > 1e-12; t *= 0.1) {
    const double p = min_power_for_rate(0, 1, t, 0.0, H, s).power;
    EXPECT_LT(p, prev);
    prev = p;
  }
  EXPECT_LT(prev, 1e-11);

  const auto too_fast = min_power_for_rate(0, 1, 20.0, 0.0, H, s);
  EXPECT_FALSE(too_fast.feasible);
  EXPECT_EQ(too_fast.power, s.devices[0].p_max);
  EXPECT_GT(too_fast.required, s.devices[0].p_max);
  EXPECT_THROW(min_power_for_rate(0, 1, 0.0, 0.0, H, s), RadioError);
}

TEST(MinPowerForRate, RoundTrip) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + trial % 3;
    const auto s = random_scenario(n, 1000 + static_cast<std::uint64_t>(trial));
    const auto H = build_channel_matrix(s);
    // Device 0 joins a group of co-transmitters at node `t` whose powers stay fixed.
    const std::size_t t = n;
    PowerAssignment a = testing::all_direct(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) a.links[k] = {t, 10.0 * u(rng)};
    const double J = received_power(t, a, H, 0);
    const double target = 1e-3 + u(rng);
    const auto need = min_power_for_rate(0, t, target, J, H, s);
    if (!need.feasible) continue;
    a.links[0] = {t, need.power};
    const double r = transmission_rate(0, a.matrix(), H, s);
    EXPECT_TRUE(oracle::close_rel(r, target, 1e-9)) << trial << " " << r << " " << target;
  }
}

TEST(EnergyCost, NondecreasingInPowerOnFineGrid) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int setting = 0; setting < 20; ++setting) {
    const auto s = random_scenario(3, 500 + static_cast<std::uint64_t>(setting));
    const auto H = build_channel_matrix(s);
    const double J = 20.0 * u(rng);
    const double gain = H(0, 3);
    double prev = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      const double p = s.devices[0].p_max * k / 1000.0;
      const double rate = std::log2(1.0 + gain * p / (J + s.sigma2));
      const double cost = transmission_energy_cost(0, p, rate, s);
      EXPECT_GE(cost, prev * (1.0 - 1e-12));
      prev = cost;
    }
  }
}

}  // namespace
}  // namespace fedrelay
