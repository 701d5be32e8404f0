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
#include "cdc/sca.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace cdc;

namespace {

SystemInstance symmetric_instance() { return SystemInstance({1, 1}, {1}, {2}, {0.5, 0.5}); }

void check_trace_nonincreasing(const ScaReport& r) {
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-7);
}

// min sum_n p_n (1 - q_n) V_n subject to sum q_n V_n <= M: fill files in
// decreasing p_n order (each unit of memory on file n saves p_n).
double single_user_lp(const SystemInstance& inst) {
  std::vector<int> order(inst.n_files());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return inst.popularity(a) > inst.popularity(b); });
  double mem = inst.cache_size(0);
  double load = 0.0;
  for (int n : order) {
    const double cached = std::min(mem, inst.file_size(n));
    mem -= cached;
    load += inst.popularity(n) * (inst.file_size(n) - cached);
  }
  return load;
}

}  // namespace

TEST_CASE("lifting reproduces the exact load") {
  const SystemInstance inst = symmetric_instance();
  const TierLayout layout({2});
  AuxiliaryProblem aux(LoadKind::worst_case, inst, layout);
  const LiftedPoint p = aux.lift(CachingParameter(1, 2, 0.5));
  CHECK(p.u == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p.objective == doctest::Approx(0.75).epsilon(1e-12));
  const LiftedPoint p0 = aux.lift(CachingParameter(1, 2, 0.0));
  CHECK(std::abs(p0.objective - worst_case_load(inst, layout, CachingParameter(1, 2, 0.0))) <=
        5e-9 * inst.total_file_size());
  CHECK((p0.x.array() == 1.0).all());
}

TEST_CASE("lifting a fully cached instance leaves only the floor") {
  const SystemInstance inst({1, 2}, {3}, {2}, {0.5, 0.5});
  const TierLayout layout({2});
  for (LoadKind kind : {LoadKind::worst_case, LoadKind::average}) {
    AuxiliaryProblem aux(kind, inst, layout);
    const LiftedPoint p = aux.lift(CachingParameter(1, 2, 1.0));
    CHECK(p.objective <= 5e-9 * inst.total_file_size());
  }
}

TEST_CASE("lifted points of random q match the exact loads") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemInstance inst({1.0 + 3 * u(rng), 1.0 + 3 * u(rng), 1.0 + 3 * u(rng)}, {1.5, 4.0},
                              {1, 2}, {0.5, 0.3, 0.2});
    const TierLayout layout({1, 2});
    Eigen::MatrixXd q(2, 3);
    for (int t = 0; t < 2; ++t) {
      for (int n = 0; n < 3; ++n) q(t, n) = u(rng);
      const double used = q.row(t).dot(Eigen::Vector3d(inst.file_sizes().data()));
      if (used > inst.cache_size(t)) q.row(t) *= inst.cache_size(t) / used;
    }
    for (LoadKind kind : {LoadKind::worst_case, LoadKind::average}) {
      AuxiliaryProblem aux(kind, inst, layout);
      const LiftedPoint p = aux.lift(CachingParameter(q));
      CHECK(std::abs(p.objective - exact_load(kind, inst, layout, CachingParameter(q))) <=
            5e-9 * inst.total_file_size());
      CHECK(aux.max_violation(aux.to_vector(p)) <= 1e-8);
    }
  }
}

TEST_CASE("single file that fits is cached completely") {
  const SystemInstance inst({5}, {5}, {1}, {1.0});
  const ScaResult r = solve_sca_worst_case(inst, TierLayout({1}), CachingParameter(1, 1, 0.2));
  CHECK(r.q(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.exact_load <= 1e-6);
  check_trace_nonincreasing(r.report);
}

TEST_CASE("symmetric instance does not exceed the uniform scheme") {
  const SystemInstance inst = symmetric_instance();
  const TierLayout layout({2});
  const CachingParameter uniform(1, 2, 0.5);
  for (LoadKind kind : {LoadKind::worst_case, LoadKind::average}) {
    const ScaResult r = solve_sca(kind, inst, layout, CachingParameter(1, 2, 0.1));
    CHECK(r.exact_load <= 0.75 + 1e-6);
    CHECK(r.report.status == ScaStatus::converged);
    CHECK(r.report.iterations <= 50);
    check_trace_nonincreasing(r.report);
    CHECK(check_feasible(inst, r.q).feasible);

    const ScaResult from_uniform = solve_sca(kind, inst, layout, uniform);
    REQUIRE(from_uniform.report.trace.size() >= 2);
    CHECK(from_uniform.report.trace[1] <= from_uniform.report.trace[0] + 1e-7);
  }
}

TEST_CASE("single-user average case reaches the LP optimum") {
  const SystemInstance inst({4, 2, 3}, {3.5}, {1}, {0.5, 0.3, 0.2});
  const ScaResult r = solve_sca_average(inst, TierLayout({1}), tier_uniform_max_file(inst));
  CHECK(r.exact_load == doctest::Approx(single_user_lp(inst)).epsilon(1e-5));
}

TEST_CASE("point-mass popularity caches only the requested file") {
  const SystemInstance inst({2, 2}, {1}, {2}, {1.0, 0.0});
  const TierLayout layout({2});
  const ScaResult r = solve_sca_average(inst, layout, CachingParameter(1, 2, 0.25));
  // Only file 1 is requested. Its demand (1, 1) costs two singleton messages
  // V (1 - q)^2 and one pair message V q (1 - q), i.e. V (1 - q)(2 - q), which
  // decreases in q, so the memory bound q = M / V = 1/2 is optimal.
  const double q1 = 0.5;
  const double closed = 2.0 * (1 - q1) * (2 - q1);
  CHECK(r.q(0, 0) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(r.exact_load == doctest::Approx(closed).epsilon(1e-5));
}

TEST_CASE("multistart over baselines is no worse than any baseline") {
  const SystemInstance inst({3, 2, 1}, {1.0, 2.5}, {1, 1}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const TierLayout layout({1, 1});
  const auto starts = default_sca_starts(inst);
  for (LoadKind kind : {LoadKind::worst_case, LoadKind::average}) {
    const ScaResult r = solve_sca_multistart(kind, inst, layout, starts);
    for (const auto& b : baseline_schemes(inst))
      CHECK(r.exact_load <= exact_load(kind, inst, layout, b.q) + 1e-6);
  }
}

TEST_CASE("model size cap raises BudgetError") {
  const SystemInstance inst({1, 1, 1}, {1}, {3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  ScaOptions opt;
  opt.max_terms = 10;
  CHECK_THROWS_AS(solve_sca_worst_case(inst, TierLayout({3}), CachingParameter(1, 3, 0.1), opt),
                  BudgetError);
}

TEST_CASE("trace CSV") {
  ScaReport r;
  r.trace = {2.0, 1.5};
  std::ostringstream os;
  write_trace_csv(os, r);
  CHECK(os.str() == "iteration,objective\n0,2\n1,1.5\n");
}
