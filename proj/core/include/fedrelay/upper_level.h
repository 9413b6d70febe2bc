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

#ifndef FEDRELAY_UPPER_LEVEL_H_
#define FEDRELAY_UPPER_LEVEL_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fedrelay/lower_level.h"
#include "fedrelay/radio.h"
#include "fedrelay/routing.h"
#include "fedrelay/scenario.h"

namespace fedrelay {

// kHinge penalizes only violations, squared, so rho vanishes exactly on the
// feasible set. kLiteral keeps the last two terms unsquared and signed,
// which rewards slack; it exists for comparison only.
enum class PenaltyForm { kHinge, kLiteral };

struct PenaltyConfig {
  std::vector<double> m_schedule = {1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  PenaltyForm form = PenaltyForm::kHinge;
  double feasibility_tol = 1e-9;  // residuals at or below this count as satisfied
};

struct SolverConfig {
  PenaltyConfig penalty;
  double eps_nash = 1e-6;
  std::size_t max_iter = 500;    // rounds per penalty stage
  std::size_t power_grid = 100;  // grid points on (0, p_max] for direct transmission
  double price_tol = 1e-10;
  double power_tol = 1e-10;  // relative
  bool reverse_order = false;
  bool order_check = true;  // solve_stackelberg also runs the opposite order
};

// Throws std::invalid_argument when the schedule is empty, not strictly
// increasing or not positive, or a tolerance is negative.
void validate(const SolverConfig& config);

struct StrategyProfile {
  PriceVector prices;
  PowerAssignment assignment;
  bool operator==(const StrategyProfile&) const = default;
};

// The five profit terms of one device.
struct ProfitTerms {
  double revenue = 0.0;          // q s
  double energy_cost = 0.0;      // c^t (I^d / r) sum_j P_ij
  double processing_cost = 0.0;  // c^p s
  double relay_revenue = 0.0;    // c^a * devices relaying through this one
  double relay_fee = 0.0;        // c^a when not transmitting directly
  double total() const {
    return revenue - energy_cost - processing_cost + relay_revenue - relay_fee;
  }
};

struct PriceResponse {
  double price = 0.0;
  bool degenerate = false;  // c^p >= c b: no price earns a positive margin
};

struct DeviceResponse {
  Link link;
  double value = 0.0;         // penalized profit at the chosen link
  bool feasible = false;      // rho == 0 at the chosen link
  bool any_feasible = false;  // false reports "no feasible action"
};

// Derived quantities of a profile.
struct ProfileState {
  Matrix powers;
  IndicatorMatrix indicator;
  DemandVector demand;
  std::vector<double> rates;
};

struct RelayDemandDiagnostic {
  std::size_t child = 0;
  std::size_t relay = 0;
  double child_demand = 0.0;
  double relay_demand = 0.0;
  double timing_residual = 0.0;  // <= 0 when the deadline is met
  bool timing_tight = false;
  bool relay_demand_larger = false;
};

struct SharedRelayDiagnostic {
  std::size_t device = 0;
  std::size_t target = 0;
  double rate = 0.0;
  double solo_rate = 0.0;  // rate with the co-relay interference removed
};

struct EquilibriumReport {
  StrategyProfile profile;
  DemandVector demand;
  std::vector<double> rates;
  std::vector<double> profits;
  std::vector<ProfitTerms> profit_terms;
  double owner_utility = 0.0;
  RoutingPlan routing;
  bool converged = false;
  std::size_t iterations = 0;              // rounds over all penalty stages
  std::vector<std::size_t> stage_rounds;   // rounds per penalty stage
  std::vector<bool> stage_converged;       // fixed point reached per stage
  double max_unilateral_gain = 0.0;
  double final_m = 0.0;
  FeasibilityReport feasibility;
  std::optional<bool> order_robust;
  std::vector<std::size_t> degenerate_devices;
  std::vector<std::size_t> devices_without_feasible_action;
  std::vector<RelayDemandDiagnostic> relay_demand;
  std::vector<SharedRelayDiagnostic> shared_relay;
};

// The devices' pricing-and-relay game over one scenario, with the owner's
// demand substituted in closed form.
class Game {
 public:
  // Validates the scenario and builds the channel matrix.
  explicit Game(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  const ChannelMatrix& channel() const { return channel_; }
  std::size_t num_devices() const { return scenario_.num_devices(); }
  double price_floor() const { return price_floor_; }

  ProfileState evaluate(const StrategyProfile& profile) const;

  ProfitTerms device_profit(std::size_t i, const StrategyProfile& profile,
                            const DemandVector& demand) const;

  // Profit with demand set to the owner's best response to the prices.
  double reduced_profit(std::size_t i, const StrategyProfile& profile) const;

  // Nonpositive constraint measure of device i: its own link structure,
  // global reachability and access-point connection, and its own deadline.
  double penalty_rho(std::size_t i, const IndicatorMatrix& indicator, const DemandVector& demand,
                     const std::vector<double>& rates, const PenaltyConfig& config) const;
  double penalty_rho(std::size_t i, const StrategyProfile& profile,
                     const PenaltyConfig& config) const;

  // reduced_profit + M * rho.
  double penalized_profit(std::size_t i, const StrategyProfile& profile, double m,
                          const PenaltyConfig& config) const;

  // Maximizes (q - c^p) (1/c) ln(c b / q) by bisection on its derivative,
  // clamped to [q_min, q_max].
  PriceResponse price_best_response(std::size_t i) const;

  // Best (target, power) for device i with everyone else fixed. A device
  // target gets the least power meeting the relay's processing deadline;
  // the access point gets the best point of the power grid.
  DeviceResponse relay_power_best_response(std::size_t i, const StrategyProfile& profile,
                                           double m, const SolverConfig& config) const;

  // Largest penalized-profit gain any single device gets by replacing its
  // strategy with its best response, never below 0.
  double max_unilateral_gain(const StrategyProfile& profile, double m,
                             const SolverConfig& config) const;

  // Every price at its upper bound, every device direct at full power.
  StrategyProfile default_initial_profile() const;

  // Round-robin best responses under each penalty coefficient in turn.
  // Non-convergence is reported in the result, never thrown.
  EquilibriumReport best_response_dynamics(
      const SolverConfig& config,
      const std::optional<StrategyProfile>& init = std::nullopt) const;

  // Best-response dynamics plus the follower's demand and utility, the
  // feasibility verdict and the order-robustness diagnostic.
  EquilibriumReport solve_stackelberg(const SolverConfig& config,
                                      const std::optional<StrategyProfile>& init = std::nullopt) const;

 private:
  EquilibriumReport assemble(const StrategyProfile& profile, const SolverConfig& config,
                             std::vector<std::size_t> stage_rounds,
                             std::vector<bool> stage_converged) const;
  void check_profile(const StrategyProfile& profile) const;

  Scenario scenario_;
  ChannelMatrix channel_;
  double price_floor_;
};

// Profiles agree when every target matches and prices and powers are within
// the given tolerances (power tolerance relative).
bool same_profile(const StrategyProfile& a, const StrategyProfile& b, double price_tol,
                  double power_tol);

}  // namespace fedrelay

#endif  // FEDRELAY_UPPER_LEVEL_H_
