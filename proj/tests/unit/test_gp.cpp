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

#include "cdc/gp.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace cdc::gp;

TEST_CASE("single bound constraint is active at the optimum") {
  GpModel m;
  const int x = m.add_variable("x");
  m.set_objective(variable(x));
  m.add_constraint(variable(x, -1.0));
  const std::vector<double> start{3.0};
  const GpResult r = solve_gp(m, start);
  CHECK(r.status == GpStatus::optimal);
  CHECK(r.point[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.kkt_residual < 1e-8);
}

TEST_CASE("product objective with two lower bounds") {
  GpModel m;
  const int x1 = m.add_variable("x1");
  const int x2 = m.add_variable("x2");
  m.set_objective(variable(x1) * variable(x2));
  m.add_constraint(Monomial(2.0, {{x1, -1.0}}));
  m.add_constraint(Monomial(3.0, {{x2, -1.0}}));
  const std::vector<double> start{5.0, 5.0};
  const GpResult r = solve_gp(m, start);
  CHECK(r.status == GpStatus::optimal);
  CHECK(r.point[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(r.point[1] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(r.objective == doctest::Approx(6.0).epsilon(1e-7));
}

TEST_CASE("unconstrained x + 1/x") {
  GpModel m;
  const int x = m.add_variable("x");
  Posynomial obj = variable(x);
  obj += variable(x, -1.0);
  m.set_objective(obj);
  const std::vector<double> start{7.0};
  const GpResult r = solve_gp(m, start);
  CHECK(r.status == GpStatus::optimal);
  CHECK(r.point[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("infeasible start goes through phase I") {
  GpModel m;
  const int x = m.add_variable("x");
  m.set_objective(variable(x));
  m.add_constraint(Monomial(4.0, {{x, -1.0}}));  // x >= 4
  const std::vector<double> start{1.0};
  const GpResult r = solve_gp(m, start);
  CHECK(r.status == GpStatus::optimal);
  CHECK(r.point[0] == doctest::Approx(4.0).epsilon(1e-7));
}

TEST_CASE("contradictory constraints are reported infeasible") {
  GpModel m;
  const int x = m.add_variable("x");
  m.set_objective(variable(x));
  m.add_constraint(Monomial(4.0, {{x, -1.0}}));  // x >= 4
  m.add_constraint(Monomial(0.5, {{x, 1.0}}));   // x <= 2
  const std::vector<double> start{1.0};
  CHECK(solve_gp(m, start).status == GpStatus::infeasible);
}

TEST_CASE("random GPs with a planted optimum") {
  // Constraints are random posynomials scaled to be active at z*; the
  // objective is the monomial whose log-gradient is -sum lambda_i grad F_i(z*),
  // so z* is the unique KKT point with objective 1.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    std::vector<double> zstar(n);
    for (double& v : zstar) v = std::exp(unif(rng));
    GpModel m;
    for (int i = 0; i < n; ++i) m.add_variable();
    std::vector<double> a0(n, 0.0);
    for (int i = 0; i < n; ++i) {
      Posynomial p;
      for (int k = 0; k < 1 + (trial + i) % 3; ++k) {
        std::vector<std::pair<int, double>> e;
        for (int v = 0; v < n; ++v) e.emplace_back(v, unif(rng) + (v == i ? 3.0 : 0.0));
        p += Monomial(pos(rng), e);
      }
      const double val = p.evaluate(zstar);
      for (auto& t : p.terms) t.coefficient /= val;
      const double lambda = pos(rng);
      for (const auto& t : p.terms) {
        const double share = t.evaluate(zstar);
        for (const auto& [v, a] : t.exponents) a0[v] -= lambda * share * a;
      }
      m.add_constraint(p);
    }
    std::vector<std::pair<int, double>> e;
    for (int v = 0; v < n; ++v) e.emplace_back(v, a0[v]);
    Monomial obj(1.0, e);
    obj.coefficient = 1.0 / obj.evaluate(zstar);
    m.set_objective(obj);

    const std::vector<double> start(n, 1e-2);
    const GpResult r = solve_gp(m, start);
    REQUIRE(r.status == GpStatus::optimal);
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));
    for (int v = 0; v < n; ++v) CHECK(r.point[v] == doctest::Approx(zstar[v]).epsilon(1e-5));
  }
}

TEST_CASE("condensation weights and tightness") {
  GpModel m;
  const int q = m.add_variable("q");
  const int x = m.add_variable("x");
  Posynomial den = variable(q);
  den += variable(x);
  {
    const std::vector<double> anchor{0.5, 0.5};
    const auto w = condensation_weights(den, anchor);
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(0.5));
  }
  {
    const std::vector<double> anchor{0.9, 0.1};
    const auto w = condensation_weights(den, anchor);
    CHECK(w[0] == doctest::Approx(0.9));
    CHECK(w[1] == doctest::Approx(0.1));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> anchor{u(rng), u(rng)};
    const std::vector<double> z{u(rng), u(rng)};
    const Monomial c = condense(den, anchor);
    CHECK(std::abs(c.evaluate(anchor) - den.evaluate(anchor)) <= 1e-12 * den.evaluate(anchor));
    CHECK(c.evaluate(z) <= den.evaluate(z) * (1.0 + 1e-12));
    const Posynomial ratio = condense_ratio(Monomial(1.0, {}), den, anchor);
    CHECK(ratio.evaluate(anchor) == doctest::Approx(1.0 / den.evaluate(anchor)));
  }
}

TEST_CASE("dump lists one monomial per line") {
  GpModel m;
  const int x = m.add_variable("x");
  m.set_objective(Monomial(2.0, {{x, 1.5}}));
  m.add_constraint(variable(x, -1.0));
  std::ostringstream os;
  dump(os, m);
  CHECK(os.str() == "variables 1\nmin 2 x^1.5\ns.t. #0 <= 1\n  + 1 x^-1\n");
}
