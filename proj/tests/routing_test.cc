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

#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fedrelay/radio.h"
#include "fedrelay/routing.h"
#include "fedrelay/upper_level.h"
#include "oracles.h"
#include "test_support.h"

namespace fedrelay {
namespace {

using testing::make_scenario;
using testing::plain_device;
using testing::table_two_plan;

TEST(IndicatorFromPowers, Examples) {
  Matrix P = Matrix::Zero(3, 3);
  EXPECT_EQ(indicator_from_powers(P).cast<int>().sum(), 0);

  P(0, 1) = 0.5;
  const auto I = indicator_from_powers(P);
  EXPECT_EQ(I(0, 1), 1);
  EXPECT_EQ(I.cast<int>().sum(), 1);

  Matrix tiny = Matrix::Zero(3, 3);
  tiny(1, 2) = 1e-300;
  EXPECT_EQ(indicator_from_powers(tiny)(1, 2), 1);
}

TEST(SingleLink, Examples) {
  EXPECT_TRUE(check_single_link(indicator_from_plan(table_two_plan())));

  auto two = indicator_from_plan(table_two_plan());
  two(0, 4) = 1;  // device 1 also transmits to device 5
  EXPECT_FALSE(check_single_link(two));

  auto self = indicator_from_plan(table_two_plan());
  self(2, 6) = 0;
  self(2, 2) = 1;
  EXPECT_FALSE(check_single_link(self));

  auto silent = indicator_from_plan(table_two_plan());
  silent(7, 9) = 0;
  EXPECT_FALSE(check_single_link(silent));
}

TEST(AccessPointConnected, Examples) {
  const auto table = indicator_from_plan(table_two_plan());
  EXPECT_TRUE(check_ap_connected(table));
  int direct = 0;
  for (int i = 0; i < 9; ++i) direct += table(i, 9);
  EXPECT_EQ(direct, 6);  // 1, 2, 4, 7, 8 and 9

  // Everyone relays to device 1, which relays to device 2.
  RoutingPlan star{{1, 0, 0, 0, 0}};
  const auto I = indicator_from_plan(star);
  EXPECT_FALSE(check_ap_connected(I));
  EXPECT_FALSE(check_acyclic_reach(I));

  EXPECT_TRUE(check_ap_connected(indicator_from_plan(RoutingPlan{{1}})));
}

TEST(AcyclicReach, Examples) {
  EXPECT_TRUE(check_acyclic_reach(indicator_from_plan(table_two_plan())));

  auto cyc = table_two_plan();
  cyc.next_hop[2] = 6;
  cyc.next_hop[6] = 2;  // 3 -> 7 -> 3
  EXPECT_FALSE(check_acyclic_reach(indicator_from_plan(cyc)));

  for (std::size_t n = 1; n <= 12; ++n) {
    RoutingPlan chain;
    for (std::size_t i = 0; i < n; ++i) chain.next_hop.push_back(i + 1);  // last hop is N_D
    EXPECT_TRUE(check_acyclic_reach(indicator_from_plan(chain))) << n;
  }
}

TEST(AcyclicReach, MatchesDfsOnEveryPlanUpToFour) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto plans = oracle::all_routing_functions(n);
    std::size_t expected = 1;
    for (std::size_t k = 0; k < n; ++k) expected *= n;
    ASSERT_EQ(plans.size(), expected);
    for (const auto& plan : plans) {
      EXPECT_EQ(check_acyclic_reach(indicator_from_plan(plan)),
                oracle::dfs_all_reach_access_point(plan))
          << format_routing_table(plan);
    }
  }
}

TEST(AcyclicReach, MatchesDfsWithSelfTargets) {
  const auto plans = oracle::all_routing_functions(4, true);
  ASSERT_EQ(plans.size(), 625u);
  for (const auto& plan : plans) {
    EXPECT_EQ(check_acyclic_reach(indicator_from_plan(plan)),
              oracle::dfs_all_reach_access_point(plan));
  }
}

TEST(StructuralChecks, AcceptExactlyForests) {
  // Powers realizing each plan; the three checks accept iff the plan is a
  // forest rooted at the access point.
  for (std::size_t n = 1; n <= 4; ++n) {
    for (const auto& plan : oracle::all_routing_functions(n)) {
      const auto I = indicator_from_powers(testing::assignment_from_plan(plan, 0.7).matrix());
      const bool accepted = check_single_link(I) && check_ap_connected(I) && check_acyclic_reach(I);
      EXPECT_EQ(accepted, oracle::dfs_all_reach_access_point(plan));
    }
  }
}

TEST(PlanFromIndicator, RoundTripAndRejection) {
  const auto plan = table_two_plan();
  EXPECT_EQ(plan_from_indicator(indicator_from_plan(plan)), plan);
  auto I = indicator_from_plan(plan);
  I(0, 1) = 1;
  EXPECT_FALSE(plan_from_indicator(I).has_value());
}

// Device 0 relays to device 1; unit processing rates so T^s equals demand.
Scenario timing_pair() {
  auto d = plain_device(1.0);
  return make_scenario({d, d}, {{1, 1}, {2, 2}}, 0.1);
}

TEST(Timing, Examples) {
  const auto s = timing_pair();
  const auto relay = indicator_from_plan(RoutingPlan{{1, 2}});

  // T^s_0 = 1, nothing relayed into 0, I^d / r = 0.1, T^s_1 = 1.05.
  auto ok = check_timing(relay, {1.0, 1.05}, {1.0, 1.0}, s);
  EXPECT_FALSE(ok[0]);
  EXPECT_TRUE(ok[1]);
  EXPECT_NEAR(*timing_residuals(relay, {1.0, 1.05}, {1.0, 1.0}, s)[0], 0.05, 1e-12);

  // Direct transmitters face no deadline.
  const auto direct = indicator_from_plan(RoutingPlan{{2, 2}});
  ok = check_timing(direct, {100.0, 0.0}, {1e-6, 1e-6}, s);
  EXPECT_TRUE(ok[0] && ok[1]);

  // Inflow adds the averaging time.
  auto three = make_scenario({plain_device(1.0), plain_device(1.0), plain_device(1.0)},
                             {{1, 1}, {2, 2}, {3, 3}}, 0.1);
  const auto I3 = indicator_from_plan(RoutingPlan{{1, 2, 3}});
  const auto r3 = timing_residuals(I3, {0.5, 1.0, 2.0}, {1.0, 1.0, 1.0}, three);
  EXPECT_NEAR(*r3[1], 1.0 + 0.01 * 1 + 0.1 - 2.0, 1e-12);
  EXPECT_FALSE(r3[2].has_value());
}

TEST(Timing, RelayWithoutRateIsAnError) {
  const auto s = timing_pair();
  const auto relay = indicator_from_plan(RoutingPlan{{1, 2}});
  EXPECT_THROW(check_timing(relay, {1.0, 2.0}, {0.0, 1.0}, s), std::domain_error);
}

TEST(Timing, MonotoneInRelayProcessingTime) {
  const auto s = timing_pair();
  const auto relay = indicator_from_plan(RoutingPlan{{1, 2}});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double own = u(rng);
    const double rate = 0.05 + u(rng);
    bool prev = false;
    for (double relay_ts = 0.0; relay_ts < 4.0; relay_ts += 0.01) {
      const bool now = check_timing(relay, {own, relay_ts}, {rate, 1.0}, s)[0];
      EXPECT_FALSE(prev && !now);
      prev = now;
    }
  }
}

TEST(Feasible, PresetWithTableTwoAtSolverDemand) {
  // Table II topology on the preset, demand and rates from the solver's
  // price best responses. Both sides of each deadline recomputed here.
  const auto s = paper_preset(7);
  Game game(s);
  StrategyProfile profile;
  for (std::size_t i = 0; i < 9; ++i) profile.prices.push_back(game.price_best_response(i).price);
  profile.assignment = testing::assignment_from_plan(table_two_plan(), 10.0);
  const auto st = game.evaluate(profile);

  const auto residuals = timing_residuals(st.indicator, st.demand, st.rates, s);
  const auto ok = check_timing(st.indicator, st.demand, st.rates, s);
  const auto inflow = inflow_counts(st.indicator);
  for (std::size_t i = 0; i < 9; ++i) {
    const std::size_t j = table_two_plan().next_hop[i];
    if (j == 9) {
      EXPECT_FALSE(residuals[i].has_value());
      continue;
    }
    const double lhs = st.demand[i] / s.devices[i].r_p + s.devices[i].T_a * inflow[i] +
                       s.I_d / st.rates[i];
    const double rhs = st.demand[j] / s.devices[j].r_p;
    EXPECT_EQ(ok[i], lhs <= rhs) << i;
    EXPECT_NEAR(*residuals[i], lhs - rhs, 1e-12);
  }
  const auto report = feasible(st.indicator, st.demand, st.rates, s);
  bool all_ok = true;
  for (bool b : ok) all_ok = all_ok && b;
  EXPECT_EQ(report.feasible, all_ok);
}

TEST(Feasible, ReportsEachViolation) {
  const auto s = timing_pair();
  auto I = indicator_from_plan(RoutingPlan{{1, 0}});  // 1 <-> 2, nobody direct
  const auto r = feasible(I, {1.0, 1.0}, {1.0, 1.0}, s);
  EXPECT_FALSE(r.feasible);
  bool ap = false, reach = false;
  for (const auto& v : r.violations) {
    ap = ap || v.constraint == "ap_connected";
    reach = reach || v.constraint == "reach";
  }
  EXPECT_TRUE(ap);
  EXPECT_TRUE(reach);

  const auto good = feasible(indicator_from_plan(RoutingPlan{{2, 2}}), {1, 1}, {1, 1}, s);
  EXPECT_TRUE(good.feasible);
  EXPECT_TRUE(good.violations.empty());
}

TEST(RoutingText, FormatsTableTwo) {
  const std::string text = format_routing_table(table_two_plan());
  EXPECT_EQ(text,
            "1 -> N_D\n2 -> N_D\n3 -> 7 -> N_D\n4 -> N_D\n5 -> 4 -> N_D\n"
            "6 -> 4 -> N_D\n7 -> N_D\n8 -> N_D\n9 -> N_D\n");
  EXPECT_EQ(parse_routing_table(text, 9), table_two_plan());
}

TEST(RoutingText, ParsesPaperStyleAndRejectsGarbage) {
  const std::string paper = "1 -> N_D.\n2->ND\n3 -> 7 -> N_D.\n4 -> N_D\n5 -> 4\n6 -> 4 -> N_D\n"
                            "7 -> N_D\n8 -> N_D\n9 -> N_D\n";
  EXPECT_EQ(parse_routing_table(paper, 9), table_two_plan());

  EXPECT_THROW(parse_routing_table("1 -> 2\n", 2), std::invalid_argument);  // 2 missing
  EXPECT_THROW(parse_routing_table("1 -> 1\n", 1), std::invalid_argument);
  EXPECT_THROW(parse_routing_table("1 -> 3\n", 1), std::invalid_argument);
  EXPECT_THROW(parse_routing_table("1 -> N_D\n1 -> 2\n2 -> N_D\n", 2), std::invalid_argument);

  const RoutingPlan cyc{{1, 0}};
  EXPECT_NE(format_routing_table(cyc).find("(cycle)"), std::string::npos);
  EXPECT_EQ(parse_routing_table(format_routing_table(cyc), 2), cyc);
}

TEST(RoutingJson, RoundTrip) {
  const auto j = routing_to_json(table_two_plan());
  EXPECT_EQ(j["3"], "7");
  EXPECT_EQ(j["1"], "N_D");
  EXPECT_EQ(routing_from_json(j), table_two_plan());
}

}  // namespace
}  // namespace fedrelay
