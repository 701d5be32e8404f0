/*
 * Copyright 2026 The cdcache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "doctest.h"

#include "cdc/baselines.hpp"
#include "cdc/converse.hpp"
#include "cdc/load_eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace cdc;

TEST_CASE("Stirling numbers of the second kind") {
  CHECK(stirling2(0, 0) == 1);
  CHECK(stirling2(3, 2) == 3);
  CHECK(stirling2(4, 2) == 7);
  CHECK(stirling2(5, 2) == 15);
  CHECK(stirling2(10, 3) == 9330);
  CHECK(stirling2(3, 0) == 0);
  CHECK(stirling2(2, 3) == 0);
  // S(30, 15) overflows 64 bits.
  CHECK(stirling2(30, 15) == boost::multiprecision::cpp_int("12879868072770626040000"));
}

TEST_CASE("distinct-demand identity") {
  for (int np = 1; np <= 8; ++np) {
    for (int m = 1; m <= 8; ++m) {
      const double closed = 1.0 - std::pow(1.0 - 1.0 / np, m);
      CHECK(std::abs(distinct_demand_weight(np, m) - closed) <= 1e-12);
    }
  }
}

TEST_CASE("worst-case bound, hand-computed") {
  const SystemInstance none({1, 1}, {0}, {2}, {0.5, 0.5});
  CHECK(converse_worst_case(none, TierLayout({2})).value == doctest::Approx(2.0));
  CHECK(converse_worst_case(none, TierLayout({2})).best_m == 2);
  const SystemInstance one({1, 1}, {1}, {2}, {0.5, 0.5});
  CHECK(converse_worst_case(one, TierLayout({2})).value == doctest::Approx(0.5));
  CHECK(converse_worst_case(one, TierLayout({2})).best_m == 1);
  const SystemInstance all({1, 1}, {2}, {2}, {0.5, 0.5});
  CHECK(converse_worst_case(all, TierLayout({2})).value == 0.0);
  CHECK(converse_worst_case(all, TierLayout({2})).best_m == 0);
}

TEST_CASE("average bound, hand-computed") {
  const SystemInstance inst({1, 1}, {0}, {1}, {0.5, 0.5});
  // N' = 1 gives 0.5 * 1; N' = 2 gives the uniform bound (1/2) * 2 = 1.
  const ConverseValue v = converse_average(inst, TierLayout({1}));
  CHECK(v.value == doctest::Approx(1.0));
  CHECK(v.best_nprime == 2);
  const std::vector<double> zero{0.0};
  for (int np = 1; np <= 2; ++np)
    CHECK(converse_average_uniform(zero, np, inst) == doctest::Approx(1.0));
}

TEST_CASE("single draw uniform bound averages the library") {
  const SystemInstance inst({4, 3, 2, 1}, {0, 1}, {1, 1}, {0.25, 0.25, 0.25, 0.25});
  const std::vector<double> zero{0.0};
  for (int np = 1; np <= 4; ++np) {
    double sum = 0.0;
    for (int i = 0; i < np; ++i) sum += inst.file_size(i);
    CHECK(converse_average_uniform(zero, np, inst) == doctest::Approx(sum / np).epsilon(1e-12));
  }
}

TEST_CASE("uniform popularity puts all weight on the full set") {
  const SystemInstance inst({2, 1, 1}, {0.5, 1.5}, {2, 1}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const TierLayout active({2, 1});
  const std::vector<double> caches{0.5, 0.5, 1.5};
  const double full = converse_average_uniform(caches, 3, inst);
  CHECK(converse_average(inst, active).value >= full - 1e-12);
}

TEST_CASE("equal sizes reduce to the single-size formulas") {
  const double f = 1.5;
  const double mem = 0.8;
  const int n = 4;
  const int users = 3;
  const SystemInstance inst(std::vector<double>(n, f), {mem}, {users}, std::vector<double>(n, 0.25));
  double best = 0.0;
  for (int m = 1; m <= std::min(n, users); ++m) {
    double nested = 0.0;
    for (int l = 1; l <= m; ++l) nested += l * mem / (n - l + 1);
    best = std::max(best, m * f - std::min(nested, static_cast<double>(m) * m * mem / n));
  }
  CHECK(converse_worst_case(inst, TierLayout({users})).value == doctest::Approx(best).epsilon(1e-12));

  const std::vector<double> caches(users, mem);
  for (int np = 1; np <= n; ++np) {
    double u = 0.0;
    for (int m = 1; m <= std::min(np, users); ++m) {
      const double keep = 1.0 - std::pow(1.0 - 1.0 / np, m);
      double nested = 0.0;
      for (int l = 1; l <= m; ++l) nested += l * mem;
      u = std::max(u, keep * np * f - std::min(nested / np, keep * m * mem));
    }
    CHECK(converse_average_uniform(caches, np, inst) == doctest::Approx(u).epsilon(1e-12));
  }
}

TEST_CASE("bounds shrink as caches grow") {
  double prev_w = 1e300;
  double prev_a = 1e300;
  for (double m : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const SystemInstance inst({2, 1.5, 1}, {m}, {3}, {0.5, 0.3, 0.2});
    const double w = converse_worst_case(inst, TierLayout({3})).value;
    const double a = converse_average(inst, TierLayout({3})).value;
    CHECK(w <= prev_w + 1e-12);
    CHECK(a <= prev_a + 1e-12);
    prev_w = w;
    prev_a = a;
  }
}

TEST_CASE("bounds lie below every baseline") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) total += x = 0.5 + 2 * u(rng);
    std::vector<double> p(n);
    double sum = 0.0;
    for (double& x : p) sum += x = u(rng) + 0.05;
    std::sort(p.begin(), p.end(), std::greater<>());
    for (double& x : p) x /= sum;
    p.back() = 1.0;
    for (int i = 0; i + 1 < n; ++i) p.back() -= p[i];
    const double m1 = total * u(rng) * 0.5;
    const SystemInstance inst(v, {m1, m1 + total * 0.3}, {1 + static_cast<int>(rng() % 2), 1}, p);
    const TierLayout layout = full_layout(inst);
    const double cw = converse_worst_case(inst, layout).value;
    const double ca = converse_average(inst, layout).value;
    for (const auto& s : baseline_schemes(inst)) {
      CHECK(cw <= worst_case_load(inst, layout, s.q) + 1e-9);
      CHECK(ca <= average_load(inst, layout, s.q) + 1e-9);
    }
  }
}

TEST_CASE("converse input checks") {
  const SystemInstance inst({1, 1}, {0, 1}, {2, 2}, {0.5, 0.5});
  CHECK_THROWS_AS(converse_worst_case(inst, TierLayout({2})), ConfigError);
  CHECK_THROWS_AS(converse_average(inst, TierLayout({3, 3}), 15.0), BudgetError);
  CHECK_NOTHROW(converse_average(inst, TierLayout({3, 3}), 16.0));
  const std::vector<double> none;
  CHECK_THROWS_AS(converse_average_uniform(none, 1, inst), ConfigError);
  const std::vector<double> one{0.0};
  CHECK_THROWS_AS(converse_average_uniform(one, 3, inst), ConfigError);
}
