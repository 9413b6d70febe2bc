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

#include "fedrelay/report_io.h"

#include <stdexcept>
#include <string>

#include "fedrelay/scenario_io.h"

namespace fedrelay {
namespace {

using nlohmann::json;

json node_label(std::size_t node, std::size_t num_devices) {
  if (node == num_devices) return "N_D";
  return static_cast<std::uint64_t>(node + 1);
}

std::size_t node_from_label(const json& v, std::size_t num_devices) {
  if (v.is_string() && v.get<std::string>() == "N_D") return num_devices;
  if (v.is_number_unsigned()) {
    const auto k = v.get<std::size_t>();
    if (k >= 1 && k <= num_devices) return k - 1;
  }
  throw std::invalid_argument("profile: bad target " + v.dump());
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("solver config: bad value for '") + key + "'");
  }
}

}  // namespace

json solver_config_to_json(const SolverConfig& c) {
  return {{"m_schedule", c.penalty.m_schedule},
          {"penalty_form", c.penalty.form == PenaltyForm::kHinge ? "hinge" : "literal"},
          {"feasibility_tol", c.penalty.feasibility_tol},
          {"eps_nash", c.eps_nash},
          {"max_iter", c.max_iter},
          {"power_grid", c.power_grid},
          {"price_tol", c.price_tol},
          {"power_tol", c.power_tol},
          {"reverse_order", c.reverse_order},
          {"order_check", c.order_check}};
}

SolverConfig solver_config_from_json(const json& j, SolverConfig c) {
  if (!j.is_object()) throw std::invalid_argument("solver config must be an object");
  read_if(j, "m_schedule", c.penalty.m_schedule);
  if (j.contains("penalty_form")) {
    const auto form = j.at("penalty_form").get<std::string>();
    if (form == "hinge") {
      c.penalty.form = PenaltyForm::kHinge;
    } else if (form == "literal") {
      c.penalty.form = PenaltyForm::kLiteral;
    } else {
      throw std::invalid_argument("solver config: penalty_form must be hinge or literal");
    }
  }
  read_if(j, "feasibility_tol", c.penalty.feasibility_tol);
  read_if(j, "eps_nash", c.eps_nash);
  read_if(j, "max_iter", c.max_iter);
  read_if(j, "power_grid", c.power_grid);
  read_if(j, "price_tol", c.price_tol);
  read_if(j, "power_tol", c.power_tol);
  read_if(j, "reverse_order", c.reverse_order);
  read_if(j, "order_check", c.order_check);
  return c;
}

json profile_to_json(const StrategyProfile& p, std::size_t n) {
  json out = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = p.assignment.links[i];
    out.push_back({{"device", i + 1},
                   {"price", p.prices[i]},
                   {"target", node_label(l.target, n)},
                   {"power", l.power}});
  }
  return out;
}

StrategyProfile profile_from_json(const json& j, std::size_t n) {
  if (!j.is_array() || j.size() != n) {
    throw std::invalid_argument("profile: expected one entry per device");
  }
  StrategyProfile p;
  p.prices.resize(n);
  p.assignment.links.resize(n);
  for (const auto& e : j) {
    const auto device = e.at("device").get<std::size_t>();
    if (device < 1 || device > n) throw std::invalid_argument("profile: bad device id");
    p.prices[device - 1] = e.at("price").get<double>();
    p.assignment.links[device - 1] = {node_from_label(e.at("target"), n),
                                      e.at("power").get<double>()};
  }
  return p;
}

json report_to_json(const EquilibriumReport& r, const Scenario& scenario,
                    const SolverConfig& config) {
  const std::size_t n = scenario.num_devices();
  json devices = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = r.profile.assignment.links[i];
    const auto& t = r.profit_terms[i];
    devices.push_back({{"device", i + 1},
                       {"price", r.profile.prices[i]},
                       {"demand", r.demand[i]},
                       {"rate", r.rates[i]},
                       {"power", l.power},
                       {"target", node_label(l.target, n)},
                       {"profit", r.profits[i]},
                       {"terms",
                        {{"revenue", t.revenue},
                         {"energy_cost", t.energy_cost},
                         {"processing_cost", t.processing_cost},
                         {"relay_revenue", t.relay_revenue},
                         {"relay_fee", t.relay_fee}}}});
  }

  json violations = json::array();
  for (const auto& v : r.feasibility.violations) {
    json e = {{"constraint", v.constraint}, {"magnitude", v.magnitude}};
    e["device"] = v.device ? json(static_cast<std::uint64_t>(*v.device + 1)) : json(nullptr);
    violations.push_back(e);
  }

  json relay_demand = json::array();
  for (const auto& d : r.relay_demand) {
    relay_demand.push_back({{"child", d.child + 1},
                            {"relay", d.relay + 1},
                            {"child_demand", d.child_demand},
                            {"relay_demand", d.relay_demand},
                            {"timing_residual", d.timing_residual},
                            {"timing_tight", d.timing_tight},
                            {"relay_demand_larger", d.relay_demand_larger}});
  }
  json shared = json::array();
  for (const auto& d : r.shared_relay) {
    shared.push_back({{"device", d.device + 1},
                      {"target", node_label(d.target, n)},
                      {"rate", d.rate},
                      {"solo_rate", d.solo_rate}});
  }
  auto one_based = [](const std::vector<std::size_t>& v) {
    json out = json::array();
    for (const auto i : v) out.push_back(i + 1);
    return out;
  };

  return {{"converged", r.converged},
          {"stage_rounds", r.stage_rounds},
          {"stage_converged", r.stage_converged},
          {"iterations", r.iterations},
          {"max_unilateral_gain", r.max_unilateral_gain},
          {"final_m", r.final_m},
          {"owner_utility", r.owner_utility},
          {"feasible", r.feasibility.feasible},
          {"violations", violations},
          {"order_robust", r.order_robust ? json(*r.order_robust) : json(nullptr)},
          {"routing", routing_to_json(r.routing)},
          {"devices", devices},
          {"profile", profile_to_json(r.profile, n)},
          {"diagnostics",
           {{"degenerate_devices", one_based(r.degenerate_devices)},
            {"devices_without_feasible_action", one_based(r.devices_without_feasible_action)},
            {"relay_demand", relay_demand},
            {"shared_relay", shared}}},
          {"solver", solver_config_to_json(config)},
          {"scenario", scenario_to_json(scenario)}};
}

LoadedReport report_from_json(const json& j) {
  LoadedReport out;
  out.scenario = scenario_from_json(j.at("scenario"));
  out.config = solver_config_from_json(j.at("solver"));
  out.profile = profile_from_json(j.at("profile"), out.scenario.num_devices());
  out.max_unilateral_gain = j.at("max_unilateral_gain").get<double>();
  out.final_m = j.at("final_m").get<double>();
  out.converged = j.at("converged").get<bool>();
  return out;
}

double recompute_unilateral_gain(const LoadedReport& loaded) {
  const Game game(loaded.scenario);
  return game.max_unilateral_gain(loaded.profile, loaded.final_m, loaded.config);
}

}  // namespace fedrelay
