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

using namespace cdc;

TEST_CASE("baseline formulas") {
  // N = 3, max V = 3, sum V = 6, caches 1.5 and 4.5.
  const SystemInstance inst({3, 2, 1}, {1.5, 4.5}, {1, 1}, {0.5, 0.3, 0.2});
  const CachingParameter a = uniform_min_cache_max_file(inst);
  const CachingParameter b = tier_uniform_max_file(inst);
  const CachingParameter c = file_uniform_min_cache(inst);
  for (int n = 0; n < 3; ++n) {
    for (int t = 0; t < 2; ++t) {
      CHECK(a(t, n) == doctest::Approx(1.5 / 9));
      CHECK(c(t, n) == doctest::Approx(0.25));
    }
    CHECK(b(0, n) == doctest::Approx(1.5 / 9));
    CHECK(b(1, n) == doctest::Approx(0.5));
  }
  for (const auto& s : baseline_schemes(inst)) CHECK(check_feasible(inst, s.q).feasible);
}

TEST_CASE("baselines clip to one") {
  const SystemInstance inst({1, 1}, {0.5, 2}, {1, 1}, {0.5, 0.5});
  CHECK(tier_uniform_max_file(inst)(1, 0) == 1.0);
  CHECK(tier_uniform_max_file(inst)(0, 0) == doctest::Approx(0.25));
  CHECK(file_uniform_min_cache(inst)(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("baseline lookup") {
  const SystemInstance inst({2, 1}, {1}, {2}, {0.5, 0.5});
  const auto all = baseline_schemes(inst);
  REQUIRE(all.size() == 3);
  CHECK(all[0].id == "uniform-alidec");
  CHECK(all[1].id == "tier-uniform");
  CHECK(all[2].id == "file-uniform");
  for (const auto& s : all) CHECK(baseline_by_id(s.id, inst).matrix() == s.q.matrix());
  CHECK_THROWS_AS(baseline_by_id("nope", inst), ConfigError);
}

TEST_CASE("baselines stay feasible on arithmetic scenarios") {
  for (double dv : {-1.0, 0.0, 1.0}) {
    ArithmeticScenario s;
    s.first_file_size = 5;
    s.file_size_step = dv;
    s.n_files = 4;
    s.first_cache_size = 1;
    s.cache_size_step = 2;
    s.n_tiers = 3;
    const SystemInstance inst = build_arithmetic_scenario(s);
    for (const auto& b : baseline_schemes(inst)) CHECK(check_feasible(inst, b.q).feasible);
  }
}
