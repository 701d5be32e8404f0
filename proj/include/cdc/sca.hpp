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
 * @file sca.hpp
 * @brief Stationary points of the load minimization problems by successive
 * convex approximation.
 *
 * The load minimization is rewritten with auxiliary variables: x_{t,n} stands
 * in for 1 - q_{t,n} through the ratio constraint 1/(q + x) <= 1, w_{d,S}
 * bounds every subset term of demand class d and subset S, and (worst case
 * only) u bounds every per-class sum of w. Everything except the ratio
 * constraint is a GP. Each iteration replaces q + x by its AM-GM monomial at
 * the previous iterate and solves the resulting GP, so the objective never
 * increases.
 *
 * Tiers with no assumed users are left out (their q is returned unchanged).
 * Tiers whose cache is below 10 * delta * sum V are fixed at q = 0.
 */

#ifndef CDC_SCA_HPP
#define CDC_SCA_HPP

#include "cdc/gp.hpp"
#include "cdc/load_eval.hpp"

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace cdc {

/// Positivity floor for q and x inside the GP.
inline constexpr double kScaFloor = 1e-9;

struct ScaOptions {
  double tol = 1e-6;      // relative objective change that ends the loop
  int max_iter = 50;
  double max_terms = 2e5;  // cap on subset-term monomials in one GP
  gp::GpOptions gp;
};

/// (q, x, w, u) point of the auxiliary problem.
struct LiftedPoint {
  Eigen::MatrixXd q;
  Eigen::MatrixXd x;
  std::vector<double> w;  // one entry per (class, subset) kept in the model
  double u = 0.0;         // worst case only
  double objective = 0.0;
};

enum class ScaStatus { converged, iteration_cap, solver_failure };

const char* to_string(ScaStatus status);

struct ScaReport {
  std::vector<double> trace;  // trace[0] is the objective at the lifted start
  int iterations = 0;
  ScaStatus status = ScaStatus::solver_failure;
  double kkt_residual = 0.0;  // of the last inner GP
  std::string message;
};

struct ScaResult {
  CachingParameter q;
  double exact_load = 0.0;
  ScaReport report;
};

/**
 * Builds the auxiliary problem once for an instance and layout and keeps the
 * index maps between (q, x, w, u) and GP variables.
 */
class AuxiliaryProblem {
 public:
  AuxiliaryProblem(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                   double max_terms = 2e5);

  /// Lifts a feasible q; throws ConfigError if q is infeasible.
  LiftedPoint lift(const CachingParameter& q) const;

  /// Objective of the auxiliary problem at a GP point.
  double objective(std::span<const double> z) const;

  /// Largest violation of the auxiliary constraints (including q + x >= 1) at a GP point.
  double max_violation(std::span<const double> z) const;

  /// GP of one iteration, with the ratio constraints condensed at `anchor`.
  gp::GpModel condensed_model(std::span<const double> anchor) const;

  std::vector<double> to_vector(const LiftedPoint& p) const;
  /// q from a GP point, clamped to [0, 1]; `base` supplies the tiers without variables.
  CachingParameter extract_q(std::span<const double> z, const CachingParameter& base) const;

  int n_variables() const { return n_vars_; }
  LoadKind kind() const { return kind_; }

 private:
  struct WEntry {
    std::size_t cls;
    std::uint64_t mask;
  };

  LoadKind kind_;
  SystemInstance instance_;
  TierLayout layout_;
  std::vector<DemandClass> classes_;
  std::vector<char> variable_tier_;  // tier has q/x variables
  std::vector<char> frozen_tier_;    // tier fixed at q = 0
  std::vector<int> q_var_;           // t * N + n -> variable id or -1
  std::vector<int> x_var_;
  std::vector<WEntry> w_entries_;
  std::vector<int> w_var_;
  std::vector<std::vector<gp::Monomial>> w_terms_;  // subset terms bounded by each w
  std::vector<std::size_t> class_w_begin_;  // w entries of class c: [begin[c], begin[c+1])
  int u_var_ = -1;
  int n_vars_ = 0;
  gp::GpModel base_;  // every constraint except the condensed ratio constraints

  gp::Monomial subset_monomial(const DemandVector& d, std::uint64_t mask, int j, bool& zero) const;
};

ScaResult solve_sca(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                    const CachingParameter& init, const ScaOptions& options = {});

ScaResult solve_sca_worst_case(const SystemInstance& instance, const TierLayout& layout,
                               const CachingParameter& init, const ScaOptions& options = {});

ScaResult solve_sca_average(const SystemInstance& instance, const TierLayout& layout,
                            const CachingParameter& init, const ScaOptions& options = {});

/// Runs from every start and keeps the lowest exact load (ties: first start).
ScaResult solve_sca_multistart(LoadKind kind, const SystemInstance& instance,
                               const TierLayout& layout,
                               std::span<const CachingParameter> starts,
                               const ScaOptions& options = {});

/// Default starts: the baseline schemes, tier-uniform first.
std::vector<CachingParameter> default_sca_starts(const SystemInstance& instance);

/// CSV rows "iteration,objective" with a header.
void write_trace_csv(std::ostream& os, const ScaReport& report);

}  // namespace cdc

#endif  // CDC_SCA_HPP
