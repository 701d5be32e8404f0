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

/**
 * @file gp.hpp
 * @brief Posynomials and a log-domain barrier solver for geometric programs.
 *
 * A geometric program minimizes a posynomial f0(z) over z > 0 subject to
 * posynomial constraints f_i(z) <= 1. With y = log z each monomial becomes the
 * exponential of an affine function, the objective stays convex and every
 * constraint becomes log f_i(exp y) <= 0, a convex log-sum-exp. The solver
 * runs a primal barrier method on that form, with damped Newton centering
 * steps factorized by a sparse LDL^T, and a phase-I GP when the start point is
 * not strictly feasible.
 */

#ifndef CDC_GP_HPP
#define CDC_GP_HPP

#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cdc::gp {

/// coefficient * prod_v z_v^exponent_v, with exponents sorted by variable id.
struct Monomial {
  double coefficient = 1.0;
  std::vector<std::pair<int, double>> exponents;

  Monomial() = default;
  Monomial(double coeff, std::vector<std::pair<int, double>> exps);

  double evaluate(std::span<const double> z) const;
  Monomial& operator*=(const Monomial& other);
};

Monomial operator*(Monomial a, const Monomial& b);
/// Reciprocal monomial 1/m.
Monomial inverse(const Monomial& m);
/// The single-variable monomial z_v.
Monomial variable(int v, double exponent = 1.0);

struct Posynomial {
  std::vector<Monomial> terms;

  Posynomial() = default;
  Posynomial(Monomial m) : terms{std::move(m)} {}  // NOLINT(google-explicit-constructor)

  double evaluate(std::span<const double> z) const;
  Posynomial& operator+=(const Monomial& m);
  Posynomial& operator+=(const Posynomial& p);
};

/// Divides every term of p by the monomial m.
Posynomial operator/(const Posynomial& p, const Monomial& m);

class GpModel {
 public:
  int add_variable(std::string name = {});
  int n_variables() const { return static_cast<int>(names_.size()); }
  const std::string& name(int v) const { return names_[v]; }

  void set_objective(Posynomial objective);
  /// Adds the constraint p(z) <= 1.
  void add_constraint(Posynomial p);

  const Posynomial& objective() const { return objective_; }
  const std::vector<Posynomial>& constraints() const { return constraints_; }

  /// Largest constraint value minus one at z (<= 0 means feasible).
  double max_violation(std::span<const double> z) const;

 private:
  std::vector<std::string> names_;
  Posynomial objective_;
  std::vector<Posynomial> constraints_;
};

/// One monomial per line: coefficient followed by var^exponent pairs.
void dump(std::ostream& os, const GpModel& model);

enum class GpStatus { optimal, infeasible, iteration_cap, numerical_failure };

const char* to_string(GpStatus status);

struct GpOptions {
  // Target KKT residual: max of the duality gap m/t and the log-domain
  // stationarity error relative to max(1, largest objective partial).
  double tol = 1e-8;
  double mu = 20.0;           // barrier parameter growth
  int max_newton = 5000;      // Newton steps over all centering rounds
  double feasibility_margin = 1e-10;
};

struct GpResult {
  std::vector<double> point;  // z, strictly positive
  double objective = 0.0;
  GpStatus status = GpStatus::numerical_failure;
  double kkt_residual = 0.0;
  int newton_steps = 0;
};

/// Solves the GP from a positive start; runs a phase-I GP first if `start` is not strictly feasible.
GpResult solve_gp(const GpModel& model, std::span<const double> start,
                  const GpOptions& options = {});

/**
 * AM-GM condensation of a posynomial around a positive anchor:
 * sum_k m_k(z) >= prod_k (m_k(z) / w_k)^{w_k} with w_k = m_k(anchor) / sum(anchor).
 * Equality holds at the anchor. Throws std::invalid_argument if the posynomial
 * vanishes there.
 */
Monomial condense(const Posynomial& p, std::span<const double> anchor);

/// The weights w_k used by condense.
std::vector<double> condensation_weights(const Posynomial& p, std::span<const double> anchor);

/// numerator / condense(denominator, anchor): a GP constraint that implies numerator <= denominator.
Posynomial condense_ratio(const Posynomial& numerator, const Posynomial& denominator,
                          std::span<const double> anchor);

}  // namespace cdc::gp

#endif  // CDC_GP_HPP
