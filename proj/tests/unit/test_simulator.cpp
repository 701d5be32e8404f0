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
#include "cdc/simulator.hpp"

#include <cmath>

using namespace cdc;

TEST_CASE("no caching sends every requested file whole") {
  const SystemInstance inst({1, 2}, {1}, {3}, {0.5, 0.5});
  const TierLayout layout({3});
  const PlacementState st = place(inst, layout, CachingParameter(1, 2, 0.0), 100, 1);
  for (int n = 0; n < 2; ++n) {
    CHECK(st.histogram[n][0] == st.units[n]);
    for (std::size_t m = 1; m < st.histogram[n].size(); ++m) CHECK(st.histogram[n][m] == 0);
  }
  const DeliveryMeasurement d = deliver(st, {0, 1, 1});
  CHECK(d.total_units == 100 + 200 + 200);
  CHECK(d.load == doctest::Approx(5.0));
}

TEST_CASE("full caching sends nothing") {
  const SystemInstance inst({1, 2}, {3}, {3}, {0.5, 0.5});
  const TierLayout layout({3});
  const PlacementState st = place(inst, layout, CachingParameter(1, 2, 1.0), 100, 1);
  CHECK(deliver(st, {1, 0, 1}).total_units == 0);
}

TEST_CASE("each user caches exactly the rounded target") {
  const SystemInstance inst({1, 1}, {1}, {3}, {0.5, 0.5});
  const TierLayout layout({3});
  const PlacementState st = place(inst, layout, CachingParameter(1, 2, 0.5), 10000, 9);
  for (int u = 0; u < 3; ++u)
    for (int n = 0; n < 2; ++n) CHECK(st.cached_units(u, n) == 5000);
  CachingParameter q(1, 2);
  q(0, 0) = 0.8;  // complement sampling path
  q(0, 1) = 0.1234;
  const PlacementState s2 = place(inst, layout, q, 10000, 9);
  CHECK(s2.cached_units(1, 0) == 8000);
  CHECK(s2.cached_units(2, 1) == 1234);
}

TEST_CASE("every user recovers its missing units") {
  const SystemInstance inst({1, 1.5, 0.5}, {0.8, 1.6}, {2, 2}, {0.5, 0.3, 0.2});
  const TierLayout layout({2, 2});
  CachingParameter q(2, 3);
  q.matrix() << 0.3, 0.2, 0.2, 0.6, 0.5, 0.3;
  const PlacementState st = place(inst, layout, q, 2000, 3);
  const DemandVector demand{2, 0, 1, 1};
  const DeliveryMeasurement d = deliver(st, demand);
  for (int j = 0; j < 4; ++j) {
    // Pieces of d_j missing at j appear in exactly the subsets that contain j.
    long received = 0;
    for (std::uint32_t s = 1; s < 16; ++s) {
      if (s >> j & 1U) received += st.histogram[demand[j]][s & ~(1U << j)];
    }
    CHECK(received == st.units[demand[j]] - st.cached_units(j, demand[j]));
  }
  long total = 0;
  for (std::uint32_t s = 1; s < 16; ++s) {
    long longest = 0;
    for (int j = 0; j < 4; ++j)
      if (s >> j & 1U) longest = std::max(longest, st.histogram[demand[j]][s & ~(1U << j)]);
    CHECK(d.message_units[s] == longest);
    total += longest;
  }
  CHECK(d.total_units == total);
}

TEST_CASE("symmetric instance matches the analytic load") {
  const SystemInstance inst({1, 1}, {1}, {2}, {0.5, 0.5});
  const TierLayout layout({2});
  const CachingParameter q(1, 2, 0.5);
  const MonteCarloResult r = monte_carlo(inst, layout, q, 10000, 200, 4, DemandMode::fixed, {0, 1});
  CHECK(r.trials == 200);
  CHECK(std::abs(r.mean - 0.75) <= std::max(3 * r.std_error, 0.01 * 0.75));
}

TEST_CASE("single user with random demands") {
  const SystemInstance inst({2, 1, 1}, {1.2}, {1}, {0.6, 0.3, 0.1});
  const TierLayout layout({1});
  CachingParameter q(1, 3);
  q(0, 0) = 0.4;
  q(0, 1) = 0.3;
  q(0, 2) = 0.1;
  const MonteCarloResult r = monte_carlo(inst, layout, q, 1000, 2000, 12, DemandMode::popularity);
  const double expected = average_load(inst, layout, q);
  CHECK(std::abs(r.mean - expected) <= 3 * r.std_error + 1e-9);
}

TEST_CASE("simulation is deterministic") {
  const SystemInstance inst({1, 2}, {1}, {2}, {0.7, 0.3});
  const TierLayout layout({2});
  CachingParameter q(1, 2);
  q(0, 0) = 0.5;
  q(0, 1) = 0.25;
  const MonteCarloResult a = monte_carlo(inst, layout, q, 500, 20, 77, DemandMode::popularity);
  const MonteCarloResult b = monte_carlo(inst, layout, q, 500, 20, 77, DemandMode::popularity);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  const PlacementState p1 = place(inst, layout, q, 500, 5);
  const PlacementState p2 = place(inst, layout, q, 500, 5);
  CHECK(p1.holders == p2.holders);
  CHECK(place(inst, layout, q, 500, 6).holders != p1.holders);
}

TEST_CASE("loads converge as the scale grows") {
  const SystemInstance inst({1, 2}, {1}, {2}, {0.5, 0.5});
  const TierLayout layout({2});
  CachingParameter q(1, 2);
  q(0, 0) = 0.5;
  q(0, 1) = 0.25;
  const double exact = demand_load(inst, layout, q, {1, 1});
  for (long scale : {2000L, 20000L}) {
    const MonteCarloResult r = monte_carlo(inst, layout, q, scale, 50, 1, DemandMode::fixed, {1, 1});
    CHECK(std::abs(r.mean - exact) <= std::max(3 * r.std_error, 0.01 * exact));
  }
}

TEST_CASE("simulator input checks") {
  const SystemInstance inst({1, 1}, {1}, {2}, {0.5, 0.5});
  const TierLayout layout({2});
  CHECK_THROWS_AS(place(inst, layout, CachingParameter(1, 2, 0.9), 10, 1), ConfigError);
  CHECK_THROWS_AS(place(inst, layout, CachingParameter(1, 2, 0.5), 0, 1), ConfigError);
  CHECK_THROWS_AS(place(inst, TierLayout({21}), CachingParameter(1, 2, 0.5), 10, 1), ConfigError);
  const PlacementState st = place(inst, layout, CachingParameter(1, 2, 0.5), 10, 1);
  CHECK_THROWS_AS(deliver(st, {0}), ConfigError);
  CHECK_THROWS_AS(deliver(st, {0, 2}), ConfigError);
  CHECK_THROWS_AS(monte_carlo(inst, layout, CachingParameter(1, 2, 0.5), 10, 1, 1, DemandMode::popularity),
                  ConfigError);
}
