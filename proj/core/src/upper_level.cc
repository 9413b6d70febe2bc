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

#include "fedrelay/upper_level.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fedrelay {
namespace {

constexpr double kBisectionWidth = 1e-10;
constexpr int kBisectionMaxSteps = 200;
// A deadline counts as tight when the residual is within this of zero.
constexpr double kTightTiming = 1e-9;

double hinge_squared(double violation, double tol) {
  return violation > tol ? violation * violation : 0.0;
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

void validate(const SolverConfig& c) {
  const auto& m = c.penalty.m_schedule;
  if (m.empty()) throw std::invalid_argument("solver: empty penalty schedule");
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0) || !std::isfinite(m[k])) {
      throw std::invalid_argument("solver: penalty coefficients must be positive and finite");
    }
    if (k > 0 && !(m[k] > m[k - 1])) {
      throw std::invalid_argument("solver: penalty schedule must be strictly increasing");
    }
  }
  if (!(c.eps_nash >= 0.0) || !(c.penalty.feasibility_tol >= 0.0) || !(c.price_tol >= 0.0) ||
      !(c.power_tol >= 0.0)) {
    throw std::invalid_argument("solver: tolerances must be >= 0");
  }
  if (c.max_iter == 0) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (c.power_grid == 0) throw std::invalid_argument("solver: power_grid must be >= 1");
}

Game::Game(Scenario scenario)
    : scenario_(std::move(scenario)),
      channel_((validate(scenario_), build_channel_matrix(scenario_))),
      price_floor_(fedrelay::price_floor(scenario_.devices)) {}

void Game::check_profile(const StrategyProfile& p) const {
  const std::size_t n = num_devices();
  if (p.prices.size() != n || p.assignment.links.size() != n) {
    throw std::invalid_argument("profile size does not match the device count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = p.assignment.links[i];
    if (l.target > n || l.target == i) {
      throw std::invalid_argument("profile: device " + std::to_string(i + 1) +
                                  " has an invalid target");
    }
    if (!(l.power >= 0.0)) {
      throw std::invalid_argument("profile: negative power for device " + std::to_string(i + 1));
    }
    if (!(p.prices[i] > 0.0)) {
      throw std::invalid_argument("profile: price of device " + std::to_string(i + 1) +
                                  " must be > 0");
    }
  }
}

ProfileState Game::evaluate(const StrategyProfile& profile) const {
  check_profile(profile);
  ProfileState st;
  st.powers = profile.assignment.matrix();
  st.indicator = indicator_from_powers(st.powers);
  st.demand = best_response_demand(scenario_, profile.prices);
  st.rates = transmission_rates(st.powers, channel_, scenario_);
  return st;
}

ProfitTerms Game::device_profit(std::size_t i, const StrategyProfile& profile,
                                const DemandVector& demand) const {
  check_profile(profile);
  const auto& d = scenario_.devices[i];
  const auto& links = profile.assignment.links;
  const std::size_t ap = scenario_.access_point();

  ProfitTerms t;
  t.revenue = profile.prices[i] * demand[i];
  t.processing_cost = d.c_p * demand[i];
  if (links[i].power > 0.0) {
    const Matrix P = profile.assignment.matrix();
    const double rate = transmission_rate(i, P, channel_, scenario_);
    t.energy_cost = transmission_energy_cost(i, links[i].power, rate, scenario_);
  }
  std::size_t served = 0;
  for (std::size_t k = 0; k < links.size(); ++k) {
    if (k != i && links[k].target == i && links[k].power > 0.0) ++served;
  }
  t.relay_revenue = scenario_.c_a * static_cast<double>(served);
  const bool direct = links[i].target == ap && links[i].power > 0.0;
  t.relay_fee = direct ? 0.0 : scenario_.c_a;
  return t;
}

double Game::reduced_profit(std::size_t i, const StrategyProfile& profile) const {
  return device_profit(i, profile, best_response_demand(scenario_, profile.prices)).total();
}

double Game::penalty_rho(std::size_t i, const IndicatorMatrix& I, const DemandVector& demand,
                         const std::vector<double>& rates, const PenaltyConfig& config) const {
  const std::size_t n = num_devices();
  const Eigen::Index row = idx(i);
  const Eigen::Index ap = idx(n);
  const double tol = config.feasibility_tol;

  int links = 0;
  for (Eigen::Index j = 0; j < I.cols(); ++j) links += I(row, j);
  const double row_term = static_cast<double>(links - 1) * (links - 1);
  const double self_term = I(row, row) ? 1.0 : 0.0;

  const IndicatorMatrix reach = absorbing_reach(I);
  const IndicatorMatrix target = all_paths_at_access_point(n + 1);
  double reach_term = 0.0;
  for (Eigen::Index r = 0; r < I.rows(); ++r) {
    for (Eigen::Index c = 0; c < I.cols(); ++c) {
      const double diff = static_cast<double>(reach(r, c)) - static_cast<double>(target(r, c));
      reach_term += diff * diff;
    }
  }

  int direct = 0;
  for (Eigen::Index k = 0; k < ap; ++k) direct += I(k, ap);

  int inflow = 0;
  for (Eigen::Index k = 0; k < ap; ++k) inflow += I(k, row);

  const auto& d = scenario_.devices[i];
  const double own_time = demand[i] / d.r_p;
  double relay_deadline = 0.0;
  bool relayed = false;
  for (std::size_t j = 0; j < n; ++j) {
    if (I(row, idx(j))) {
      relay_deadline += demand[j] / scenario_.devices[j].r_p;
      relayed = true;
    }
  }
  const bool transmitting = rates[i] > 0.0;
  const double transfer_time = transmitting ? scenario_.I_d / rates[i] : 0.0;

  double rho = -row_term - self_term - reach_term;
  if (config.form == PenaltyForm::kHinge) {
    rho -= hinge_squared(1.0 - direct, tol);
    if (relayed && !I(row, ap)) {
      const double residual =
          transmitting ? own_time + d.T_a * inflow + transfer_time - relay_deadline
                       : std::numeric_limits<double>::infinity();
      rho -= hinge_squared(residual, tol);
    }
  } else {
    rho += static_cast<double>(direct - 1);
    rho += relay_deadline - own_time - d.T_a * inflow - transfer_time;
  }
  return rho;
}

double Game::penalty_rho(std::size_t i, const StrategyProfile& profile,
                         const PenaltyConfig& config) const {
  const ProfileState st = evaluate(profile);
  return penalty_rho(i, st.indicator, st.demand, st.rates, config);
}

double Game::penalized_profit(std::size_t i, const StrategyProfile& profile, double m,
                              const PenaltyConfig& config) const {
  if (!(m > 0.0)) throw std::invalid_argument("penalized_profit: M must be > 0");
  const ProfileState st = evaluate(profile);
  const double profit = device_profit(i, profile, st.demand).total();
  return profit + m * penalty_rho(i, st.indicator, st.demand, st.rates, config);
}

PriceResponse Game::price_best_response(std::size_t i) const {
  const auto& d = scenario_.devices[i];
  const double cb = d.accuracy.c * d.accuracy.b;
  const double lo_bound = price_floor_;
  const double hi_bound = d.q_max;
  if (d.c_p >= cb) return {std::clamp(cb, lo_bound, hi_bound), true};

  // d/dq of (q - c^p) ln(cb/q) / c is (ln(cb/q) - (q - c^p)/q) / c: positive
  // at c^p, negative at cb, strictly decreasing in between.
  auto slope = [&](double q) { return std::log(cb / q) - (q - d.c_p) / q; };
  double lo = d.c_p;
  double hi = cb;
  for (int step = 0; step < kBisectionMaxSteps && hi - lo > kBisectionWidth; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {std::clamp(0.5 * (lo + hi), lo_bound, hi_bound), false};
}

DeviceResponse Game::relay_power_best_response(std::size_t i, const StrategyProfile& profile,
                                               double m, const SolverConfig& config) const {
  check_profile(profile);
  const std::size_t n = num_devices();
  const std::size_t ap = scenario_.access_point();
  const auto& d = scenario_.devices[i];
  const auto demand = best_response_demand(scenario_, profile.prices);

  std::size_t inflow = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& l = profile.assignment.links[k];
    if (k != i && l.target == i && l.power > 0.0) ++inflow;
  }
  const double own_time = demand[i] / d.r_p + d.T_a * static_cast<double>(inflow);

  StrategyProfile candidate = profile;
  std::optional<DeviceResponse> best;
  bool any_feasible = false;
  auto consider = [&](Link link) {
    candidate.assignment.links[i] = link;
    const ProfileState st = evaluate(candidate);
    const double rho = penalty_rho(i, st.indicator, st.demand, st.rates, config.penalty);
    const double value = device_profit(i, candidate, st.demand).total() + m * rho;
    const bool ok = rho == 0.0;
    any_feasible = any_feasible || ok;
    if (!best || value > best->value) best = DeviceResponse{link, value, ok, false};
  };

  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double slack = demand[j] / scenario_.devices[j].r_p - own_time;
    Link link{j, d.p_max};
    if (slack > 0.0) {
      const double interference = received_power(j, profile.assignment, channel_, i);
      const auto need = min_power_for_rate(i, j, scenario_.I_d / slack, interference, channel_,
                                           scenario_);
      link.power = need.power;
    }
    consider(link);
  }
  const std::size_t grid = config.power_grid;
  auto grid_power = [&](std::size_t k) {
    return d.p_max * static_cast<double>(k) / static_cast<double>(grid);
  };
  if (config.penalty.form == PenaltyForm::kLiteral) {
    for (std::size_t k = 1; k <= grid; ++k) consider({ap, grid_power(k)});
  } else {
    // Along the grid only the energy term moves: the link structure is
    // fixed and a direct link carries no deadline.
    candidate.assignment.links[i] = {ap, grid_power(1)};
    const ProfileState st = evaluate(candidate);
    const double rho = penalty_rho(i, st.indicator, st.demand, st.rates, config.penalty);
    ProfitTerms terms = device_profit(i, candidate, st.demand);
    terms.energy_cost = 0.0;
    const double fixed = terms.total() + m * rho;
    const double interference = received_power(ap, profile.assignment, channel_, i);
    const double gain = channel_(idx(i), idx(ap));
    const bool ok = rho == 0.0;
    any_feasible = any_feasible || ok;
    for (std::size_t k = 1; k <= grid; ++k) {
      const double p = grid_power(k);
      const double rate = shannon_rate(d.w, gain * p, interference, scenario_.sigma2);
      const double value = fixed - transmission_energy_cost(i, p, rate, scenario_);
      if (!best || value > best->value) best = DeviceResponse{{ap, p}, value, ok, false};
    }
  }

  best->any_feasible = any_feasible;
  return *best;
}

double Game::max_unilateral_gain(const StrategyProfile& profile, double m,
                                 const SolverConfig& config) const {
  double gain = 0.0;
  for (std::size_t i = 0; i < num_devices(); ++i) {
    StrategyProfile deviation = profile;
    deviation.prices[i] = price_best_response(i).price;
    deviation.assignment.links[i] = relay_power_best_response(i, deviation, m, config).link;
    const double delta = penalized_profit(i, deviation, m, config.penalty) -
                         penalized_profit(i, profile, m, config.penalty);
    gain = std::max(gain, delta);
  }
  return gain;
}

StrategyProfile Game::default_initial_profile() const {
  StrategyProfile p;
  const std::size_t ap = scenario_.access_point();
  for (const auto& d : scenario_.devices) {
    p.prices.push_back(d.q_max);
    p.assignment.links.push_back({ap, d.p_max});
  }
  return p;
}

EquilibriumReport Game::best_response_dynamics(const SolverConfig& config,
                                               const std::optional<StrategyProfile>& init) const {
  validate(config);
  StrategyProfile profile = init ? *init : default_initial_profile();
  check_profile(profile);

  const std::size_t n = num_devices();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.reverse_order) std::reverse(order.begin(), order.end());

  std::vector<std::size_t> stage_rounds;
  std::vector<bool> stage_converged;
  for (const double m : config.penalty.m_schedule) {
    bool converged = false;
    std::size_t rounds = 0;
    for (std::size_t round = 0; round < config.max_iter; ++round) {
      ++rounds;
      bool changed = false;
      for (const std::size_t i : order) {
        const double q = price_best_response(i).price;
        if (std::abs(q - profile.prices[i]) > config.price_tol) changed = true;
        profile.prices[i] = q;

        const Link next = relay_power_best_response(i, profile, m, config).link;
        const Link prev = profile.assignment.links[i];
        if (next.target != prev.target ||
            std::abs(next.power - prev.power) > config.power_tol * std::max(1.0, prev.power)) {
          changed = true;
        }
        profile.assignment.links[i] = next;
      }
      if (!changed) {
        converged = true;
        break;
      }
    }
    stage_rounds.push_back(rounds);
    stage_converged.push_back(converged);
  }
  return assemble(profile, config, std::move(stage_rounds), std::move(stage_converged));
}

EquilibriumReport Game::assemble(const StrategyProfile& profile, const SolverConfig& config,
                                 std::vector<std::size_t> stage_rounds,
                                 std::vector<bool> stage_converged) const {
  const std::size_t n = num_devices();
  const ProfileState st = evaluate(profile);
  const double m = config.penalty.m_schedule.back();

  EquilibriumReport r;
  r.profile = profile;
  r.demand = st.demand;
  r.rates = st.rates;
  r.owner_utility = owner_utility(scenario_, st.demand, profile.prices);
  r.routing = profile.assignment.plan();
  r.iterations = std::accumulate(stage_rounds.begin(), stage_rounds.end(), std::size_t{0});
  r.stage_rounds = std::move(stage_rounds);
  r.stage_converged = std::move(stage_converged);
  r.final_m = m;
  r.feasibility = feasible(st.indicator, st.demand, st.rates, scenario_,
                           config.penalty.feasibility_tol);
  r.max_unilateral_gain = max_unilateral_gain(profile, m, config);
  // Earlier stages only warm-start the last one; the certificate is the
  // fixed point at the final coefficient.
  r.converged = r.stage_converged.back() && r.max_unilateral_gain <= config.eps_nash &&
                r.feasibility.feasible;

  for (std::size_t i = 0; i < n; ++i) {
    const ProfitTerms t = device_profit(i, profile, st.demand);
    r.profit_terms.push_back(t);
    r.profits.push_back(t.total());
    if (price_best_response(i).degenerate) r.degenerate_devices.push_back(i);
    if (!relay_power_best_response(i, profile, m, config).any_feasible) {
      r.devices_without_feasible_action.push_back(i);
    }
  }

  const auto residuals = timing_residuals(st.indicator, st.demand, st.rates, scenario_);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& link = profile.assignment.links[i];
    if (link.target < n && residuals[i]) {
      RelayDemandDiagnostic diag;
      diag.child = i;
      diag.relay = link.target;
      diag.child_demand = st.demand[i];
      diag.relay_demand = st.demand[link.target];
      diag.timing_residual = *residuals[i];
      diag.timing_tight = std::abs(*residuals[i]) <= kTightTiming;
      diag.relay_demand_larger = diag.relay_demand > diag.child_demand;
      r.relay_demand.push_back(diag);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& link = profile.assignment.links[i];
    if (link.power <= 0.0) continue;
    const double interference = received_power(link.target, profile.assignment, channel_, i);
    if (interference <= 0.0) continue;
    SharedRelayDiagnostic diag;
    diag.device = i;
    diag.target = link.target;
    diag.rate = st.rates[i];
    diag.solo_rate = shannon_rate(scenario_.devices[i].w,
                                  channel_(idx(i), idx(link.target)) * link.power, 0.0,
                                  scenario_.sigma2);
    r.shared_relay.push_back(diag);
  }
  return r;
}

EquilibriumReport Game::solve_stackelberg(const SolverConfig& config,
                                          const std::optional<StrategyProfile>& init) const {
  EquilibriumReport report = best_response_dynamics(config, init);
  if (config.order_check) {
    SolverConfig flipped = config;
    flipped.reverse_order = !config.reverse_order;
    const EquilibriumReport other = best_response_dynamics(flipped, init);
    report.order_robust = other.converged == report.converged &&
                          same_profile(report.profile, other.profile, 1e-9, 1e-6);
  }
  return report;
}

bool same_profile(const StrategyProfile& a, const StrategyProfile& b, double price_tol,
                  double power_tol) {
  if (a.prices.size() != b.prices.size() ||
      a.assignment.links.size() != b.assignment.links.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.prices.size(); ++i) {
    if (std::abs(a.prices[i] - b.prices[i]) > price_tol) return false;
    const auto& la = a.assignment.links[i];
    const auto& lb = b.assignment.links[i];
    if (la.target != lb.target) return false;
    if (std::abs(la.power - lb.power) > power_tol * std::max(1.0, std::abs(la.power))) {
      return false;
    }
  }
  return true;
}

}  // namespace fedrelay
