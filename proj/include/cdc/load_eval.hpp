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
 * @file load_eval.hpp
 * @brief Shared-link load of the q-parameterized decentralized scheme.
 *
 * For a demand vector d over the K users of a layout, the delivery sends, for
 * every nonempty user subset S, one coded message whose length is the largest
 * of the subfile lengths
 *
 *   term(S, j) = V_{d_j} * prod_{a in S\{j}} q_{tier(a), d_j}
 *                        * prod_{b notin S\{j}} (1 - q_{tier(b), d_j}).
 *
 * The worst-case load maximizes the sum of these message lengths over demand
 * vectors; the average load weights each demand vector by prod_j p_{d_j}.
 * The smoothed variants replace each max by a log-sum-exp with parameter c
 * (the average keeps its outer expectation).
 *
 * Users inside a tier are exchangeable, so all functions enumerate demand
 * classes (per-tier multisets) instead of the N^K raw demand vectors. Classes
 * are processed in parallel in fixed-size blocks and combined in a fixed
 * order, so results do not depend on the thread count.
 */

#ifndef CDC_LOAD_EVAL_HPP
#define CDC_LOAD_EVAL_HPP

#include "cdc/demand.hpp"
#include "cdc/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace cdc {

enum class LoadKind { worst_case, average };

struct EvalOptions {
  /// Maximum number of subset-term evaluations, classes * K * 2^(K-1).
  double budget = 5e6;
};

/// Length of W_{d_j, S\{j}} per unit file: mask bit u set means user u is in S.
double subset_term(const SystemInstance& instance, const TierLayout& layout,
                   const CachingParameter& q, const DemandVector& demand, std::uint64_t subset,
                   int j);

/// Load of one demand vector: sum over nonempty subsets of the max subset term.
double demand_load(const SystemInstance& instance, const TierLayout& layout,
                   const CachingParameter& q, const DemandVector& demand);

struct WorstDemand {
  DemandVector demand;
  double load = 0.0;
};

/// Worst-case load and a demand vector attaining it (first class in enumeration order).
WorstDemand worst_case_demand(const SystemInstance& instance, const TierLayout& layout,
                              const CachingParameter& q, const EvalOptions& opts = {});

double worst_case_load(const SystemInstance& instance, const TierLayout& layout,
                       const CachingParameter& q, const EvalOptions& opts = {});

double average_load(const SystemInstance& instance, const TierLayout& layout,
                    const CachingParameter& q, const EvalOptions& opts = {});

double exact_load(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                  const CachingParameter& q, const EvalOptions& opts = {});

/// Double log-sum-exp upper bound on the worst-case load. Requires c >= 1.
double smoothed_worst_case(const SystemInstance& instance, const TierLayout& layout,
                           const CachingParameter& q, double c, const EvalOptions& opts = {});

/// Expectation of per-subset log-sum-exp terms; upper bound on the average load.
double smoothed_average(const SystemInstance& instance, const TierLayout& layout,
                        const CachingParameter& q, double c, const EvalOptions& opts = {});

double smoothed_load(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                     const CachingParameter& q, double c, const EvalOptions& opts = {});

struct SmoothedEvaluation {
  double value = 0.0;
  Eigen::MatrixXd gradient;  // T x N, d value / d q(t, n)
};

/**
 * Smoothed objective with its analytic gradient. At q = 0 or q = 1 the
 * polynomial expressions are differentiated as written, which gives the
 * one-sided derivatives.
 */
SmoothedEvaluation smoothed_value_and_gradient(LoadKind kind, const SystemInstance& instance,
                                               const TierLayout& layout,
                                               const CachingParameter& q, double c,
                                               const EvalOptions& opts = {});

Eigen::MatrixXd smoothed_gradient(LoadKind kind, const SystemInstance& instance,
                                  const TierLayout& layout, const CachingParameter& q, double c,
                                  const EvalOptions& opts = {});

/// Numerically stable (1/c) log sum_i exp(c x_i).
double log_sum_exp(std::span<const double> x, double c);

}  // namespace cdc

#endif  // CDC_LOAD_EVAL_HPP
