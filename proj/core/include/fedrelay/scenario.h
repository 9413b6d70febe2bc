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

#ifndef FEDRELAY_SCENARIO_H_
#define FEDRELAY_SCENARIO_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fedrelay {

using Matrix = Eigen::MatrixXd;

// Weibull accuracy curve f(s) = a - b * exp(-c * s).
struct AccuracyModel {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
};

// Per-device economic, compute and radio parameters. Units are the
// unit-agnostic model units of the experiment setup.
struct DeviceParams {
  double c_p = 0.0;  // energy cost per data unit processed
  double c_t = 0.0;  // cost per power unit per time unit
  double r_p = 0.0;  // processing rate, data units per time
  double T_a = 0.0;  // averaging time per received update
  double w = 1.0;    // bandwidth
  AccuracyModel accuracy;
  double s_max = 0.0;  // demand upper bound
  double q_max = 0.0;  // price upper bound
  double p_max = 0.0;  // power upper bound
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// A full problem instance. Nodes 0..n-1 are the devices; node n is the
// owner's access point.
struct Scenario {
  std::vector<DeviceParams> devices;
  std::vector<Point> positions;  // n + 1 entries, access point last
  Matrix h;                      // raw channel gains over all nodes
  double alpha = 2.0;
  double sigma2 = 1.0;
  double I_d = 0.1;  // model-update size
  double c_a = 0.0;  // relay-service fee

  std::size_t num_devices() const { return devices.size(); }
  std::size_t num_nodes() const { return devices.size() + 1; }
  std::size_t access_point() const { return devices.size(); }
};

// H_ij = h_ij / d_ij^alpha over all nodes, with H_ii = 0.
using ChannelMatrix = Matrix;

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Every violated type invariant, one human-readable line each. Empty when
// the scenario is valid.
std::vector<std::string> invariant_violations(const Scenario& scenario);

// Throws ScenarioError naming the first violations when the scenario is
// invalid.
void validate(const Scenario& scenario);

double distance(const Point& p, const Point& q);

// Throws ScenarioError on coincident positions.
ChannelMatrix build_channel_matrix(const Scenario& scenario);

// Smallest admissible price, 1e-6 * min_i(c_i b_i). Prices at zero would
// send the follower's demand to infinity.
double price_floor(const std::vector<DeviceParams>& devices);

// (1/c) ln(c b / q_min): the demand cap that binds only at the price floor.
double default_demand_cap(const AccuracyModel& accuracy, double q_min);

// Nine-device instance of the numerical study. Positions of the nine
// devices and the access point are drawn uniformly on [0,10]^2 from
// `seed`; everything else is fixed.
Scenario paper_preset(std::uint64_t seed);

struct GaussianParam {
  double mean = 0.0;
  double stddev = 0.0;
};

// Distribution parameters for random_scenario. Defaults are centred on the
// statistics of the nine-device preset.
struct RandomScenarioSpec {
  GaussianParam c_t{80.0, 40.0};
  GaussianParam c_p{8.5e-3, 3.0e-3};
  GaussianParam r_p{70.0, 18.0};
  GaussianParam T_a{1.0e-2, 0.25e-2};
  GaussianParam acc_b{11.0, 1.5};
  GaussianParam acc_c{12.0, 2.5};
  bool a_equals_b = true;
  GaussianParam acc_a{11.0, 1.5};  // used when a_equals_b is false
  double floor = 1e-6;             // truncation floor for every Gaussian draw
  double w = 1.0;
  double h = 10.0;
  double alpha = 2.0;
  double sigma2 = 1.0;
  double I_d = 0.1;
  double c_a = 0.0096;
  double p_max = 10.0;
  double side = 10.0;  // positions uniform on [0, side]^2
};

// Deterministic in (n, seed, spec). Throws ScenarioError for n == 0 or a
// negative standard deviation.
Scenario random_scenario(std::size_t n, std::uint64_t seed,
                         const RandomScenarioSpec& spec = {});

}  // namespace fedrelay

#endif  // FEDRELAY_SCENARIO_H_
