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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fedrelay/lower_level.h"
#include "oracles.h"
#include "test_support.h"

namespace fedrelay {
namespace {

const AccuracyModel kDeviceOne{9.78, 9.78, 15.28};

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(accuracy({5.0, 3.0, 2.0}, 0.0), 2.0);
  EXPECT_NEAR(accuracy({5.0, 3.0, 2.0}, 1e3), 5.0, 1e-15);
  EXPECT_THROW(accuracy(kDeviceOne, -1e-9), std::domain_error);

  const double v = accuracy(kDeviceOne, 0.1);
  EXPECT_DOUBLE_EQ(v, 9.78 * (1.0 - std::exp(-1.528)));
  // Taylor series of exp(-x) at x = 1.528, 40 terms.
  double series = 0.0, term = 1.0;
  for (int k = 0; k < 40; ++k) {
    series += term;
    term *= -1.528 / (k + 1);
  }
  EXPECT_NEAR(v, 9.78 * (1.0 - series), 1e-12);
}

TEST(Accuracy, IncreasingAndConcave) {
  double prev = accuracy(kDeviceOne, 0.0);
  double prev_step = 1e300;
  for (int k = 1; k < 1000; ++k) {
    const double cur = accuracy(kDeviceOne, k * 1e-3);
    EXPECT_GT(cur, prev);
    EXPECT_LT(cur - prev, prev_step);
    EXPECT_LT(cur, kDeviceOne.a);
    prev_step = cur - prev;
    prev = cur;
  }
}

TEST(OwnerUtility, Examples) {
  auto s = paper_preset(7);
  const std::vector<double> zero(9, 0.0), q(9, 1.0);
  EXPECT_DOUBLE_EQ(owner_utility(s, zero, q), 0.0);  // a = b everywhere

  s.devices[2].accuracy.a = 20.0;
  EXPECT_DOUBLE_EQ(owner_utility(s, zero, q), 20.0 - s.devices[2].accuracy.b);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> d(9), p(9);
    double expected = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
      d[i] = u(rng);
      p[i] = 10.0 * u(rng);
      const auto& m = s.devices[i].accuracy;
      expected += m.a - m.b * std::exp(-m.c * d[i]) - p[i] * d[i];
    }
    EXPECT_NEAR(owner_utility(s, d, p), expected, 1e-12);
  }
  EXPECT_THROW(owner_utility(s, {1.0}, q), std::invalid_argument);
}

DeviceParams device_one() {
  DeviceParams d = testing::plain_device();
  d.accuracy = kDeviceOne;
  d.q_max = kDeviceOne.c * kDeviceOne.b;
  d.s_max = 1.0;
  return d;
}

TEST(BestResponseDemand, Examples) {
  const auto d = device_one();
  const double cb = 15.28 * 9.78;
  EXPECT_EQ(best_response_demand(d, cb), 0.0);
  EXPECT_EQ(best_response_demand(d, 2 * cb), 0.0);
  EXPECT_NEAR(best_response_demand(d, cb / std::numbers::e), 1.0 / 15.28, 1e-15);
  EXPECT_THROW(best_response_demand(d, 0.0), std::domain_error);

  // Clamp at the cap.
  EXPECT_EQ(best_response_demand(d, 1e-9), d.s_max);
}

TEST(BestResponseDemand, MatchesGridArgmax) {
  const auto d = device_one();
  const double q = 10.0;
  const double s = best_response_demand(d, q);
  const double grid = oracle::fine_grid_argmax(
      [&](double x) { return 9.78 - 9.78 * std::exp(-15.28 * x) - q * x; }, 0.0, d.s_max);
  EXPECT_NEAR(s, grid, 1e-5);
  EXPECT_LE(std::abs(q - 15.28 * 9.78 * std::exp(-15.28 * s)), 1e-9);
}

TEST(BestResponseDemand, ExactArgmaxOnPreset) {
  // 100 random price vectors; each coordinate's objective separates, so a
  // per-coordinate 1e-3 grid is the full joint grid.
  const auto s = paper_preset(7);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q(9);
    for (std::size_t i = 0; i < 9; ++i) {
      std::uniform_real_distribution<double> u(0.05, s.devices[i].q_max);
      q[i] = u(rng);
    }
    const auto star = best_response_demand(s, q);
    const double best = owner_utility(s, star, q);
    for (std::size_t i = 0; i < 9; ++i) {
      const auto& m = s.devices[i].accuracy;
      const double own = m.a - m.b * std::exp(-m.c * star[i]) - q[i] * star[i];
      for (double x = 0.0; x <= 1.0; x += 1e-3) {
        EXPECT_GE(own, m.a - m.b * std::exp(-m.c * x) - q[i] * x - 1e-12);
      }
      if (star[i] > 0.0 && star[i] < s.devices[i].s_max) {
        EXPECT_LE(std::abs(q[i] - m.c * m.b * std::exp(-m.c * star[i])), 1e-9);
      }
    }
    auto moved = star;
    moved[trial % 9] += 1e-3;
    EXPECT_GE(best, owner_utility(s, moved, q));
  }
}

TEST(BestResponseDemand, MonotoneInOwnPriceOnly) {
  const auto s = paper_preset(7);
  std::vector<double> q(9, 5.0);
  const auto base = best_response_demand(s, q);
  double prev = base[0];
  for (double p = 5.0; p < 200.0; p += 0.5) {
    q[0] = p;
    const auto d = best_response_demand(s, q);
    EXPECT_LE(d[0], prev);
    for (std::size_t j = 1; j < 9; ++j) EXPECT_EQ(d[j], base[j]);
    prev = d[0];
  }
}

TEST(Concavity, Certificate) {
  const auto s = paper_preset(7);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> q(9);
    for (auto& x : q) x = u(rng);
    const auto cert = concavity_certificate(s, q);
    EXPECT_TRUE(cert.negative_definite);
    for (std::size_t i = 0; i < 9; ++i) {
      EXPECT_LT(cert.hessian_diagonal[i], 0.0);
      // Central second difference of the owner's utility in coordinate i.
      const auto& m = s.devices[i].accuracy;
      const double x = cert.demand[i];
      const double h = 1e-4;
      auto f = [&](double v) { return m.a - m.b * std::exp(-m.c * v) - q[i] * v; };
      const double fd = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
      EXPECT_TRUE(oracle::close_rel(fd, cert.hessian_diagonal[i], 1e-4))
          << fd << " " << cert.hessian_diagonal[i];
    }
  }
  // s = 0 gives -c^2 b.
  std::vector<double> at_ceiling(9);
  for (std::size_t i = 0; i < 9; ++i) {
    at_ceiling[i] = s.devices[i].accuracy.c * s.devices[i].accuracy.b;
  }
  const auto cert = concavity_certificate(s, at_ceiling);
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& m = s.devices[i].accuracy;
    EXPECT_DOUBLE_EQ(cert.hessian_diagonal[i], -m.c * m.c * m.b);
  }
}

}  // namespace
}  // namespace fedrelay
