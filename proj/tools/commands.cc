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

#include "commands.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fedrelay/report_io.h"
#include "fedrelay/routing.h"
#include "fedrelay/scenario_io.h"

namespace fedrelay::cli {
namespace {

using nlohmann::json;

constexpr const char* kPresetName = "paper9";
constexpr const char* kEquilibriumHeader = "device_id,price,demand,rate,power,target,profit\n";

std::string target_label(std::size_t target, std::size_t num_devices) {
  return target == num_devices ? std::string("N_D") : std::to_string(target + 1);
}

// Writes through a temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string table_view(const EquilibriumReport& r) {
  const std::size_t n = r.profile.prices.size();
  std::ostringstream out;
  out << "routing:\n" << format_routing_table(r.routing) << '\n';
  out << std::left << std::setw(8) << "device" << std::setw(14) << "price" << std::setw(14)
      << "demand" << std::setw(14) << "rate" << std::setw(14) << "power" << std::setw(8)
      << "target" << "profit\n";
  out << std::setprecision(6);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = r.profile.assignment.links[i];
    out << std::setw(8) << (i + 1) << std::setw(14) << r.profile.prices[i] << std::setw(14)
        << r.demand[i] << std::setw(14) << r.rates[i] << std::setw(14) << l.power
        << std::setw(8) << target_label(l.target, n) << r.profits[i] << '\n';
  }
  out << "\nowner utility: " << r.owner_utility << '\n';
  out << "converged: " << (r.converged ? "yes" : "no") << " (rounds " << r.iterations
      << ", max unilateral gain " << r.max_unilateral_gain << ", feasible "
      << (r.feasibility.feasible ? "yes" : "no") << ")\n";
  return out.str();
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  if (name == "table") return OutputFormat::kTable;
  throw ConfigError("unknown format '" + name + "' (expected csv, json or table)");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(start, end - start);
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    start = end + 1;
    if (token.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ConfigError("not a number: '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

LoadedRun load_run(const RunConfig& c) {
  const int sources = static_cast<int>(c.scenario_path.has_value()) +
                      static_cast<int>(c.preset.has_value()) +
                      static_cast<int>(c.random_devices.has_value());
  if (sources != 1) {
    throw ConfigError("exactly one of --scenario, --preset or --random is required");
  }

  LoadedRun run;
  if (c.scenario_path) {
    const json j = read_json_file(*c.scenario_path);
    try {
      run.scenario = scenario_from_json(j);
      if (j.contains("solver")) run.solver = solver_config_from_json(j.at("solver"));
    } catch (const std::exception& e) {
      throw ConfigError(c.scenario_path->string() + ": " + e.what());
    }
  } else {
    if (!c.seed) throw ConfigError("--seed is required with --preset and --random");
    if (c.preset) {
      if (*c.preset != kPresetName) throw ConfigError("unknown preset '" + *c.preset + "'");
      run.scenario = paper_preset(*c.seed);
    } else {
      try {
        run.scenario = random_scenario(*c.random_devices, *c.seed);
      } catch (const ScenarioError& e) {
        throw ConfigError(e.what());
      }
    }
  }

  if (c.eps_nash) run.solver.eps_nash = *c.eps_nash;
  if (c.m_schedule) run.solver.penalty.m_schedule = *c.m_schedule;
  if (c.max_iter) run.solver.max_iter = *c.max_iter;
  if (c.no_order_check) run.solver.order_check = false;
  try {
    validate(run.solver);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return run;
}

std::string equilibrium_csv(const EquilibriumReport& r) {
  const std::size_t n = r.profile.prices.size();
  std::string out = kEquilibriumHeader;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = r.profile.assignment.links[i];
    out += std::to_string(i + 1) + ',' + format_number(r.profile.prices[i]) + ',' +
           format_number(r.demand[i]) + ',' + format_number(r.rates[i]) + ',' +
           format_number(l.power) + ',' + target_label(l.target, n) + ',' +
           format_number(r.profits[i]) + '\n';
  }
  return out;
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  LoadedRun run;
  try {
    run = load_run(config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  bool ok = true;
  const auto problems = invariant_violations(run.scenario);
  for (const auto& p : problems) out << "invalid: " << p << '\n';
  ok = problems.empty();
  if (!ok) return kExitInvalidConfig;
  out << "scenario: valid (" << run.scenario.num_devices() << " devices)\n";

  try {
    if (config.routing_path) {
      const RoutingPlan plan =
          parse_routing_table(read_text_file(*config.routing_path), run.scenario.num_devices());
      const IndicatorMatrix I = indicator_from_plan(plan);
      const bool single = check_single_link(I);
      const bool connected = check_ap_connected(I);
      const bool reach = check_acyclic_reach(I);
      out << "routing single_link: " << (single ? "ok" : "violated") << '\n'
          << "routing ap_connected: " << (connected ? "ok" : "violated") << '\n'
          << "routing acyclic_reach: " << (reach ? "ok" : "violated") << '\n';
      ok = ok && single && connected && reach;
    }
    if (config.profile_path) {
      const json j = read_json_file(*config.profile_path);
      const StrategyProfile profile =
          profile_from_json(j.contains("profile") ? j.at("profile") : j,
                            run.scenario.num_devices());
      const Game game(run.scenario);
      const ProfileState st = game.evaluate(profile);
      const FeasibilityReport rep = feasible(st.indicator, st.demand, st.rates, run.scenario,
                                             run.solver.penalty.feasibility_tol);
      for (const auto& v : rep.violations) {
        out << "profile violation: " << v.constraint;
        if (v.device) out << " (device " << (*v.device + 1) << ")";
        out << " magnitude " << v.magnitude << '\n';
      }
      out << "profile: " << (rep.feasible ? "feasible" : "infeasible") << '\n';
      ok = ok && rep.feasible;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  return ok ? kExitOk : kExitInvalidConfig;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  LoadedRun run;
  std::optional<Game> game;
  try {
    run = load_run(config);
    game.emplace(run.scenario);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  const EquilibriumReport report = game->solve_stackelberg(run.solver);
  const std::string csv = equilibrium_csv(report);
  const std::string report_json = report_to_json(report, run.scenario, run.solver).dump(2) + '\n';

  if (config.out_dir) {
    try {
      std::filesystem::create_directories(*config.out_dir);
      const auto& dir = *config.out_dir;
      write_atomically(dir / "routing.txt", format_routing_table(report.routing));
      for (const char* name : {"prices.csv", "demands.csv", "rates.csv", "profits.csv"}) {
        write_atomically(dir / name, csv);
      }
      write_atomically(dir / "report.json", report_json);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitInvalidConfig;
    }
  }

  switch (config.format) {
    case OutputFormat::kCsv:
      out << csv;
      break;
    case OutputFormat::kJson:
      out << report_json;
      break;
    case OutputFormat::kTable:
      out << table_view(report);
      break;
  }
  if (!report.converged) {
    err << "warning: best-response dynamics did not reach a feasible equilibrium\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

Scenario with_parameter(Scenario s, const std::string& parameter, double value) {
  if (parameter == "c_a") {
    s.c_a = value;
  } else if (parameter == "I_d") {
    s.I_d = value;
  } else if (parameter == "sigma2") {
    s.sigma2 = value;
  } else if (parameter == "alpha") {
    s.alpha = value;
  } else if (parameter == "h") {
    s.h.setConstant(value);
  } else {
    throw ConfigError("unknown sweep parameter '" + parameter +
                      "' (expected c_a, I_d, sigma2, alpha or h)");
  }
  return s;
}

std::vector<SweepPoint> run_sweep(const Scenario& base, const SolverConfig& solver,
                                  const SweepSpec& spec) {
  std::vector<SweepPoint> points(spec.values.size());
  for (std::size_t k = 0; k < points.size(); ++k) points[k].value = spec.values[k];
  if (points.empty()) return points;

  // Throws for an unknown name before any worker starts.
  (void)with_parameter(base, spec.parameter, spec.values.front());

  std::size_t threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      try {
        const Game game(with_parameter(base, spec.parameter, points[k].value));
        points[k].report = game.solve_stackelberg(solver);
      } catch (const std::exception& e) {
        points[k].error = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  return points;
}

std::string sweep_csv(const std::string& parameter, const std::vector<SweepPoint>& points) {
  std::string out =
      "parameter,value,converged,iterations,max_unilateral_gain,owner_utility,device_id,price,"
      "demand,rate,power,target,profit,energy_cost,relay_revenue,relay_fee\n";
  for (const auto& p : points) {
    if (!p.report) continue;
    const auto& r = *p.report;
    const std::size_t n = r.profile.prices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& l = r.profile.assignment.links[i];
      const auto& t = r.profit_terms[i];
      out += parameter + ',' + format_number(p.value) + ',' + (r.converged ? "1" : "0") + ',' +
             std::to_string(r.iterations) + ',' + format_number(r.max_unilateral_gain) + ',' +
             format_number(r.owner_utility) + ',' + std::to_string(i + 1) + ',' +
             format_number(r.profile.prices[i]) + ',' + format_number(r.demand[i]) + ',' +
             format_number(r.rates[i]) + ',' + format_number(l.power) + ',' +
             target_label(l.target, n) + ',' + format_number(r.profits[i]) + ',' +
             format_number(t.energy_cost) + ',' + format_number(t.relay_revenue) + ',' +
             format_number(t.relay_fee) + '\n';
    }
  }
  return out;
}

int cmd_sweep(const RunConfig& config, const SweepSpec& spec, std::ostream& out,
              std::ostream& err) {
  LoadedRun run;
  std::vector<SweepPoint> points;
  try {
    run = load_run(config);
    validate(run.scenario);
    points = run_sweep(run.scenario, run.solver, spec);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  bool all_converged = true;
  for (const auto& p : points) {
    if (!p.report) {
      err << "error: " << spec.parameter << " = " << p.value << ": " << p.error << '\n';
      return kExitInvalidConfig;
    }
    all_converged = all_converged && p.report->converged;
  }

  const std::string csv = sweep_csv(spec.parameter, points);
  if (config.out_dir) {
    try {
      std::filesystem::create_directories(*config.out_dir);
      write_atomically(*config.out_dir / "sweep.csv", csv);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitInvalidConfig;
    }
  } else {
    out << csv;
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace fedrelay::cli
