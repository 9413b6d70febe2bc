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

#include "fedrelay/routing.h"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fedrelay {
namespace {

constexpr std::string_view kAccessPointName = "N_D";

IndicatorMatrix bool_product(const IndicatorMatrix& a, const IndicatorMatrix& b) {
  const Eigen::Index n = a.rows();
  IndicatorMatrix out = IndicatorMatrix::Zero(n, b.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      if (!a(i, k)) continue;
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        if (b(k, j)) out(i, j) = 1;
      }
    }
  }
  return out;
}

int row_sum(const IndicatorMatrix& m, Eigen::Index row) {
  int sum = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) sum += m(row, j);
  return sum;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '.')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

IndicatorMatrix indicator_from_powers(const Matrix& powers) {
  return (powers.array() > 0.0).cast<std::uint8_t>().matrix();
}

IndicatorMatrix indicator_from_plan(const RoutingPlan& plan) {
  const auto nodes = static_cast<Eigen::Index>(plan.num_devices() + 1);
  IndicatorMatrix I = IndicatorMatrix::Zero(nodes, nodes);
  for (std::size_t i = 0; i < plan.num_devices(); ++i) {
    I(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(plan.next_hop[i])) = 1;
  }
  return I;
}

std::optional<RoutingPlan> plan_from_indicator(const IndicatorMatrix& I) {
  const Eigen::Index devices = I.rows() - 1;
  RoutingPlan plan;
  plan.next_hop.resize(static_cast<std::size_t>(devices));
  for (Eigen::Index i = 0; i < devices; ++i) {
    if (row_sum(I, i) != 1) return std::nullopt;
    for (Eigen::Index j = 0; j < I.cols(); ++j) {
      if (I(i, j)) plan.next_hop[static_cast<std::size_t>(i)] = static_cast<std::size_t>(j);
    }
  }
  return plan;
}

bool check_single_link(const IndicatorMatrix& I) {
  const Eigen::Index devices = I.rows() - 1;
  for (Eigen::Index i = 0; i < devices; ++i) {
    if (I(i, i) != 0 || row_sum(I, i) != 1) return false;
  }
  return true;
}

bool check_ap_connected(const IndicatorMatrix& I) {
  const Eigen::Index ap = I.rows() - 1;
  for (Eigen::Index i = 0; i < ap; ++i) {
    if (I(i, ap)) return true;
  }
  return false;
}

IndicatorMatrix absorbing_reach(const IndicatorMatrix& I) {
  const Eigen::Index ap = I.rows() - 1;
  IndicatorMatrix base = I;
  base(ap, ap) = 1;

  // Exponent |N^0|; with the absorbing access point any exponent at least
  // the longest chain gives the same answer.
  auto exponent = static_cast<std::size_t>(ap);
  IndicatorMatrix result = IndicatorMatrix::Identity(I.rows(), I.cols());
  while (exponent > 0) {
    if (exponent & 1U) result = bool_product(result, base);
    exponent >>= 1U;
    if (exponent > 0) base = bool_product(base, base);
  }
  return result;
}

IndicatorMatrix all_paths_at_access_point(std::size_t nodes) {
  const auto n = static_cast<Eigen::Index>(nodes);
  IndicatorMatrix target = IndicatorMatrix::Zero(n, n);
  target.col(n - 1).setOnes();
  return target;
}

bool check_acyclic_reach(const IndicatorMatrix& I) {
  return absorbing_reach(I) == all_paths_at_access_point(static_cast<std::size_t>(I.rows()));
}

std::vector<double> processing_times(const Scenario& scenario, const std::vector<double>& demand) {
  std::vector<double> t(scenario.num_devices());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = demand[i] / scenario.devices[i].r_p;
  return t;
}

std::vector<std::size_t> inflow_counts(const IndicatorMatrix& I) {
  const Eigen::Index devices = I.rows() - 1;
  std::vector<std::size_t> inflow(static_cast<std::size_t>(devices), 0);
  for (Eigen::Index k = 0; k < devices; ++k) {
    for (Eigen::Index i = 0; i < devices; ++i) {
      if (I(k, i)) ++inflow[static_cast<std::size_t>(i)];
    }
  }
  return inflow;
}

std::vector<std::optional<double>> timing_residuals(const IndicatorMatrix& I,
                                                    const std::vector<double>& demand,
                                                    const std::vector<double>& rates,
                                                    const Scenario& scenario) {
  const std::size_t n = scenario.num_devices();
  const auto ap = static_cast<Eigen::Index>(n);
  const auto ts = processing_times(scenario, demand);
  const auto inflow = inflow_counts(I);

  std::vector<std::optional<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    if (I(row, ap)) continue;
    double relay_deadline = 0.0;
    bool relayed = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (I(row, static_cast<Eigen::Index>(j))) {
        relay_deadline += ts[j];
        relayed = true;
      }
    }
    if (!relayed) continue;
    if (!(rates[i] > 0.0)) {
      throw std::domain_error("timing: device " + std::to_string(i + 1) +
                              " relays its update but has no positive rate");
    }
    const auto& d = scenario.devices[i];
    out[i] = ts[i] + d.T_a * static_cast<double>(inflow[i]) + scenario.I_d / rates[i] -
             relay_deadline;
  }
  return out;
}

std::vector<bool> check_timing(const IndicatorMatrix& I, const std::vector<double>& demand,
                               const std::vector<double>& rates, const Scenario& scenario,
                               double tolerance) {
  const auto residuals = timing_residuals(I, demand, rates, scenario);
  std::vector<bool> ok(residuals.size(), true);
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i]) ok[i] = *residuals[i] <= tolerance;
  }
  return ok;
}

FeasibilityReport feasible(const IndicatorMatrix& I, const std::vector<double>& demand,
                           const std::vector<double>& rates, const Scenario& scenario,
                           double tolerance) {
  FeasibilityReport report;
  const Eigen::Index ap = I.rows() - 1;
  auto add = [&](std::string what, std::optional<std::size_t> device, double magnitude) {
    report.feasible = false;
    report.violations.push_back({std::move(what), device, magnitude});
  };

  for (Eigen::Index i = 0; i < ap; ++i) {
    const auto dev = static_cast<std::size_t>(i);
    const int sum = row_sum(I, i);
    if (sum != 1) add("single_link", dev, std::abs(sum - 1));
    if (I(i, i)) add("self_loop", dev, 1.0);
  }

  int direct = 0;
  for (Eigen::Index i = 0; i < ap; ++i) direct += I(i, ap);
  if (direct < 1) add("ap_connected", std::nullopt, 1.0);

  const IndicatorMatrix reach = absorbing_reach(I);
  const IndicatorMatrix target = all_paths_at_access_point(static_cast<std::size_t>(I.rows()));
  for (Eigen::Index i = 0; i < I.rows(); ++i) {
    int mismatches = 0;
    for (Eigen::Index j = 0; j < I.cols(); ++j) mismatches += reach(i, j) != target(i, j);
    if (mismatches > 0) {
      add("reach", i < ap ? std::optional<std::size_t>(static_cast<std::size_t>(i)) : std::nullopt,
          mismatches);
    }
  }

  const auto residuals = timing_residuals(I, demand, rates, scenario);
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i] && *residuals[i] > tolerance) add("timing", i, *residuals[i]);
  }
  return report;
}

std::string format_routing_table(const RoutingPlan& plan) {
  const std::size_t n = plan.num_devices();
  std::ostringstream out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> seen(n, false);
    out << (i + 1);
    std::size_t node = i;
    seen[node] = true;
    while (true) {
      node = plan.next_hop[node];
      if (node >= n) {
        out << " -> " << kAccessPointName;
        break;
      }
      out << " -> " << (node + 1);
      if (seen[node]) {
        out << " (cycle)";
        break;
      }
      seen[node] = true;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::size_t parse_node(std::string_view token, std::size_t num_devices) {
  token = trim(token);
  if (token == kAccessPointName || token == "ND") return num_devices;
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value == 0 ||
      value > num_devices) {
    throw std::invalid_argument("routing: bad node '" + std::string(token) + "'");
  }
  return value - 1;
}

}  // namespace

RoutingPlan parse_routing_table(std::string_view text, std::size_t num_devices) {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> hop(num_devices, kUnset);

  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    auto line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = trim(text.substr(line_start, line_end - line_start));
    line_start = line_end + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.find("(cycle)") != std::string_view::npos) {
      line = trim(line.substr(0, line.find("(cycle)")));
    }

    std::vector<std::size_t> chain;
    std::size_t pos = 0;
    while (true) {
      const auto arrow = line.find("->", pos);
      chain.push_back(parse_node(line.substr(pos, arrow == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : arrow - pos),
                                 num_devices));
      if (arrow == std::string_view::npos) break;
      pos = arrow + 2;
    }
    if (chain.size() < 2) {
      throw std::invalid_argument("routing: row '" + std::string(line) + "' has no next hop");
    }
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      const std::size_t from = chain[k];
      if (from == num_devices) throw std::invalid_argument("routing: N_D cannot forward");
      if (hop[from] != kUnset && hop[from] != chain[k + 1]) {
        throw std::invalid_argument("routing: device " + std::to_string(from + 1) +
                                    " has two different next hops");
      }
      hop[from] = chain[k + 1];
    }
  }
  for (std::size_t i = 0; i < num_devices; ++i) {
    if (hop[i] == kUnset) {
      throw std::invalid_argument("routing: no next hop for device " + std::to_string(i + 1));
    }
    if (hop[i] == i) {
      throw std::invalid_argument("routing: device " + std::to_string(i + 1) + " targets itself");
    }
  }
  return RoutingPlan{std::move(hop)};
}

nlohmann::json routing_to_json(const RoutingPlan& plan) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < plan.num_devices(); ++i) {
    const std::size_t to = plan.next_hop[i];
    j[std::to_string(i + 1)] =
        to == plan.access_point() ? std::string(kAccessPointName) : std::to_string(to + 1);
  }
  return j;
}

RoutingPlan routing_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("routing: expected an object");
  const std::size_t n = j.size();
  RoutingPlan plan;
  plan.next_hop.assign(n, n);
  for (const auto& [key, value] : j.items()) {
    const std::size_t from = parse_node(key, n);
    if (from == n) throw std::invalid_argument("routing: N_D cannot forward");
    plan.next_hop[from] = parse_node(value.get<std::string>(), n);
  }
  return plan;
}

}  // namespace fedrelay
