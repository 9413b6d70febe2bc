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

#include "fedrelay/scenario_io.h"

#include <fstream>
#include <optional>
#include <string>

namespace fedrelay {
namespace {

using nlohmann::json;

constexpr double kDefaultPowerCap = 10.0;

double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ScenarioError(where + ": missing field '" + key + "'");
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ScenarioError(where + ": field '" + key + "' is not a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key,
                                      const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return number(obj, key, where);
}

bool off_diagonal_constant(const Matrix& h) {
  if (h.rows() < 2) return true;
  const double ref = h(0, 1);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      if (i != j && h(i, j) != ref) return false;
    }
  }
  return true;
}

}  // namespace

json scenario_to_json(const Scenario& s) {
  json devices = json::array();
  for (const auto& d : s.devices) {
    devices.push_back({{"c_p", d.c_p},
                       {"c_t", d.c_t},
                       {"r_p", d.r_p},
                       {"T_a", d.T_a},
                       {"w", d.w},
                       {"accuracy", {{"a", d.accuracy.a}, {"b", d.accuracy.b}, {"c", d.accuracy.c}}},
                       {"s_max", d.s_max},
                       {"q_max", d.q_max},
                       {"p_max", d.p_max}});
  }
  json positions = json::array();
  for (const auto& p : s.positions) positions.push_back({p.x, p.y});

  json h;
  if (s.h.rows() >= 2 && off_diagonal_constant(s.h)) {
    h = s.h(0, 1);
  } else {
    h = json::array();
    for (Eigen::Index i = 0; i < s.h.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < s.h.cols(); ++j) row.push_back(s.h(i, j));
      h.push_back(row);
    }
  }
  return {{"devices", devices},
          {"positions", positions},
          {"global",
           {{"alpha", s.alpha}, {"sigma2", s.sigma2}, {"I_d", s.I_d}, {"c_a", s.c_a}, {"h", h}}}};
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario: top level must be an object");
  for (const char* key : {"devices", "positions", "global"}) {
    if (!j.contains(key)) throw ScenarioError(std::string("scenario: missing '") + key + "'");
  }
  const auto& jd = j.at("devices");
  if (!jd.is_array()) throw ScenarioError("scenario: 'devices' must be an array");

  Scenario s;
  s.devices.reserve(jd.size());
  for (std::size_t i = 0; i < jd.size(); ++i) {
    const std::string where = "devices[" + std::to_string(i) + "]";
    const auto& e = jd[i];
    DeviceParams d;
    d.c_p = number(e, "c_p", where);
    d.c_t = number(e, "c_t", where);
    d.r_p = number(e, "r_p", where);
    d.T_a = number(e, "T_a", where);
    d.w = optional_number(e, "w", where).value_or(1.0);
    if (!e.contains("accuracy")) throw ScenarioError(where + ": missing field 'accuracy'");
    const auto& acc = e.at("accuracy");
    d.accuracy.a = number(acc, "a", where + ".accuracy");
    d.accuracy.b = number(acc, "b", where + ".accuracy");
    d.accuracy.c = number(acc, "c", where + ".accuracy");
    // Bounds are filled below once every device is known (the price floor
    // is a property of the whole fleet).
    d.s_max = optional_number(e, "s_max", where).value_or(-1.0);
    d.q_max = optional_number(e, "q_max", where).value_or(-1.0);
    d.p_max = optional_number(e, "p_max", where).value_or(kDefaultPowerCap);
    s.devices.push_back(d);
  }
  const double q_min = s.devices.empty() ? 0.0 : price_floor(s.devices);
  for (std::size_t i = 0; i < jd.size(); ++i) {
    auto& d = s.devices[i];
    if (!jd[i].contains("q_max")) d.q_max = d.accuracy.c * d.accuracy.b;
    if (!jd[i].contains("s_max")) d.s_max = default_demand_cap(d.accuracy, q_min);
  }

  const auto& jp = j.at("positions");
  if (!jp.is_array()) throw ScenarioError("scenario: 'positions' must be an array");
  for (std::size_t i = 0; i < jp.size(); ++i) {
    const auto& p = jp[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ScenarioError("positions[" + std::to_string(i) + "] must be [x, y]");
    }
    s.positions.push_back({p[0].get<double>(), p[1].get<double>()});
  }

  const auto& g = j.at("global");
  s.alpha = number(g, "alpha", "global");
  s.sigma2 = number(g, "sigma2", "global");
  s.I_d = number(g, "I_d", "global");
  s.c_a = number(g, "c_a", "global");
  if (!g.contains("h")) throw ScenarioError("global: missing field 'h'");
  const auto& h = g.at("h");
  const auto nodes = static_cast<Eigen::Index>(s.num_nodes());
  if (h.is_number()) {
    s.h = Matrix::Constant(nodes, nodes, h.get<double>());
  } else if (h.is_array()) {
    if (static_cast<Eigen::Index>(h.size()) != nodes) {
      throw ScenarioError("global.h: expected " + std::to_string(nodes) + " rows");
    }
    s.h.resize(nodes, nodes);
    for (Eigen::Index r = 0; r < nodes; ++r) {
      const auto& row = h[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != nodes) {
        throw ScenarioError("global.h: row " + std::to_string(r) + " has the wrong length");
      }
      for (Eigen::Index c = 0; c < nodes; ++c) {
        const auto& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) throw ScenarioError("global.h: non-numeric entry");
        s.h(r, c) = v.get<double>();
      }
    }
  } else {
    throw ScenarioError("global.h must be a number or a square matrix");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario file " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
}

}  // namespace fedrelay
