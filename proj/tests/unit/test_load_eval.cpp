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

#include "cdc/load_eval.hpp"
#include "cdc/reference.hpp"
#include "cdc/smooth_opt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

using namespace cdc;

namespace {

// Random instance with strictly increasing tier caches and a feasible q.
struct RandomCase {
  SystemInstance instance;
  TierLayout layout;
  CachingParameter q;
};

RandomCase random_case(std::mt19937_64& rng, int n_files, std::vector<int> counts) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n_files);
  for (double& x : v) x = 0.5 + 2.0 * u(rng);
  double total = 0.0;
  for (double x : v) total += x;
  const int tiers = static_cast<int>(counts.size());
  std::vector<double> m(tiers);
  for (int t = 0; t < tiers; ++t) m[t] = total * (t + 1) / (tiers + 1);
  std::vector<double> p(n_files);
  double sum = 0.0;
  for (double& x : p) sum += x = u(rng) + 0.1;
  std::sort(p.begin(), p.end(), std::greater<>());
  for (double& x : p) x /= sum;
  p.back() += 1.0 - std::accumulate(p.begin(), p.end(), 0.0);
  SystemInstance inst(v, m, counts, p);
  Eigen::MatrixXd raw(tiers, n_files);
  for (int t = 0; t < tiers; ++t)
    for (int n = 0; n < n_files; ++n) raw(t, n) = u(rng);
  return {inst, TierLayout(counts), project_feasible(raw, inst)};
}

}  // namespace

TEST_CASE("symmetric two-user instance") {
  const SystemInstance inst({1, 1}, {1}, {2}, {0.5, 0.5});
  const TierLayout layout({2});
  const CachingParameter q(1, 2, 0.5);
  CHECK(worst_case_load(inst, layout, q) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(average_load(inst, layout, q) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("unequal file sizes, hand-computed loads") {
  const SystemInstance inst({1, 2}, {1}, {2}, {0.5, 0.5});
  const TierLayout layout({2});
  CachingParameter q(1, 2);
  q(0, 0) = 0.5;
  q(0, 1) = 0.25;
  CHECK(demand_load(inst, layout, q, {0, 0}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(demand_load(inst, layout, q, {0, 1}) == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(demand_load(inst, layout, q, {1, 0}) == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(demand_load(inst, layout, q, {1, 1}) == doctest::Approx(2.625).epsilon(1e-12));
  const WorstDemand w = worst_case_demand(inst, layout, q);
  CHECK(w.load == doctest::Approx(2.625).epsilon(1e-12));
  CHECK(w.demand == DemandVector{1, 1});
  CHECK(average_load(inst, layout, q) == doctest::Approx(1.71875).epsilon(1e-12));
  // Subset term for S = {0, 1}, j = 1 on demand (0, 1): V_2 q_2 (1 - q_2).
  CHECK(subset_term(inst, layout, q, {0, 1}, 0b11, 1) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("single user closed forms") {
  const SystemInstance inst({3, 2, 1}, {2}, {1}, {0.5, 0.3, 0.2});
  const TierLayout layout({1});
  CachingParameter q(1, 3);
  q(0, 0) = 0.2;
  q(0, 1) = 0.5;
  q(0, 2) = 0.4;
  const double worst = std::max({3 * 0.8, 2 * 0.5, 1 * 0.6});
  const double avg = 0.5 * 3 * 0.8 + 0.3 * 2 * 0.5 + 0.2 * 1 * 0.6;
  CHECK(worst_case_load(inst, layout, q) == doctest::Approx(worst).epsilon(1e-12));
  CHECK(average_load(inst, layout, q) == doctest::Approx(avg).epsilon(1e-12));
}

TEST_CASE("no caching and full caching") {
  const SystemInstance inst({2, 1}, {0, 3}, {1, 2}, {0.6, 0.4});
  const TierLayout layout({1, 2});
  const CachingParameter zero(2, 2, 0.0);
  // Every user receives its whole file; the worst case asks for the largest one.
  CHECK(worst_case_load(inst, layout, zero) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(average_load(inst, layout, zero) == doctest::Approx(3 * (0.6 * 2 + 0.4 * 1)).epsilon(1e-12));
  CachingParameter full(2, 2, 1.0);
  full(0, 0) = 0.0;
  full(0, 1) = 0.0;
  // Only the tier-0 user misses; its file travels in the subset of all three users.
  CHECK(worst_case_load(inst, layout, full) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("class enumeration matches the naive reference") {
  std::mt19937_64 rng(2026);
  const std::vector<std::pair<int, std::vector<int>>> shapes{
      {2, {2}}, {3, {1, 2}}, {3, {2, 0, 1}}, {2, {1, 1, 1}}, {4, {3}}, {3, {2, 2}}};
  for (const auto& [n, counts] : shapes) {
    for (int rep = 0; rep < 3; ++rep) {
      const RandomCase rc = random_case(rng, n, counts);
      CHECK(worst_case_load(rc.instance, rc.layout, rc.q) ==
            doctest::Approx(reference::worst_case_load(rc.instance, rc.layout, rc.q)).epsilon(1e-12));
      CHECK(average_load(rc.instance, rc.layout, rc.q) ==
            doctest::Approx(reference::average_load(rc.instance, rc.layout, rc.q)).epsilon(1e-12));
      for (double c : {1.0, 4.0}) {
        CHECK(smoothed_worst_case(rc.instance, rc.layout, rc.q, c) ==
              doctest::Approx(reference::smoothed_worst_case(rc.instance, rc.layout, rc.q, c)).epsilon(1e-12));
        CHECK(smoothed_average(rc.instance, rc.layout, rc.q, c) ==
              doctest::Approx(reference::smoothed_average(rc.instance, rc.layout, rc.q, c)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("smoothed loads sandwich the exact loads") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const RandomCase rc = random_case(rng, 2, {2});
    const double w = worst_case_load(rc.instance, rc.layout, rc.q);
    const double a = average_load(rc.instance, rc.layout, rc.q);
    const double sw = smoothed_worst_case(rc.instance, rc.layout, rc.q, 1.0);
    const double sa = smoothed_average(rc.instance, rc.layout, rc.q, 1.0);
    CHECK(w <= sw + 1e-12);
    CHECK(sw <= w + 3.0 * std::log(2.0) + 1e-12);
    CHECK(a <= sa + 1e-12);
    CHECK(sa <= a + std::log(2.0) + 1e-12);
  }
}

TEST_CASE("smoothed gradients match finite differences") {
  std::mt19937_64 rng(99);
  const RandomCase rc = random_case(rng, 3, {1, 2});
  // Keep entries away from the box so central differences stay inside [0, 1].
  CachingParameter q = rc.q;
  q.matrix() = q.matrix().array() * 0.8 + 0.1;
  const double h = 1e-6;
  for (LoadKind kind : {LoadKind::worst_case, LoadKind::average}) {
    const SmoothedEvaluation e = smoothed_value_and_gradient(kind, rc.instance, rc.layout, q, 2.0);
    CHECK(e.value == doctest::Approx(smoothed_load(kind, rc.instance, rc.layout, q, 2.0)).epsilon(1e-12));
    for (int t = 0; t < q.n_tiers(); ++t) {
      for (int n = 0; n < q.n_files(); ++n) {
        CachingParameter hi = q;
        CachingParameter lo = q;
        hi(t, n) += h;
        lo(t, n) -= h;
        const double fd = (smoothed_load(kind, rc.instance, rc.layout, hi, 2.0) -
                           smoothed_load(kind, rc.instance, rc.layout, lo, 2.0)) /
                          (2 * h);
        CHECK(e.gradient(t, n) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("log-sum-exp is stable") {
  const std::vector<double> x{1000.0, 1000.0};
  CHECK(log_sum_exp(x, 1.0) == doctest::Approx(1000.0 + std::log(2.0)));
  const std::vector<double> y{-1e300, 0.0};
  CHECK(log_sum_exp(y, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("budget is enforced") {
  const SystemInstance inst({1, 1, 1, 1}, {1}, {6}, {0.25, 0.25, 0.25, 0.25});
  const TierLayout layout({6});
  const CachingParameter q(1, 4, 0.25);
  EvalOptions tight;
  tight.budget = 100;
  CHECK_THROWS_AS(worst_case_load(inst, layout, q, tight), BudgetError);
  CHECK_NOTHROW(worst_case_load(inst, layout, q));
}
