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
 * @file smooth_opt.hpp
 * @brief Low-complexity solver: projected gradient descent on the smoothed
 * load from several random feasible starts.
 */

#ifndef CDC_SMOOTH_OPT_HPP
#define CDC_SMOOTH_OPT_HPP

#include "cdc/load_eval.hpp"

#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

namespace cdc {

struct ProjectedGradConfig {
  double c = 1.0;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  int starts = 8;
  double tol = 1e-9;  // stop when no entry of q moves by more than tol
  int max_iter = 500;
  std::uint64_t seed = 1;
  int checkpoint_every = 25;  // exact load recorded every this many iterations
  EvalOptions eval;
};

struct SmoothTraceRow {
  int start = 0;
  int iteration = 0;
  double smoothed = 0.0;
  double exact = std::numeric_limits<double>::quiet_NaN();  // NaN off checkpoints
};

struct SmoothResult {
  CachingParameter q;
  double smoothed = 0.0;
  double exact_load = 0.0;  // NaN if exact evaluation exceeds the budget
  int best_start = 0;
  std::vector<double> start_values;  // final smoothed value of every start
  std::vector<SmoothTraceRow> trace;
};

/**
 * Euclidean projection onto {0 <= q <= 1, sum_n q_{t,n} V_n <= M_t}. Tiers
 * decouple; each is solved by bisection on its multiplier lambda with
 * q = clip(q_hat - lambda V, 0, 1), returning the feasible end of the bracket.
 */
CachingParameter project_feasible(const Eigen::MatrixXd& q_hat, const SystemInstance& instance);

/// Best (lowest smoothed value, ties to the lowest start index) of `config.starts` runs.
SmoothResult minimize_smoothed(LoadKind kind, const SystemInstance& instance,
                               const TierLayout& layout, const ProjectedGradConfig& config = {});

/// Random feasible start `index` for a seed: projected uniform [0, 1] draws.
CachingParameter random_feasible_start(const SystemInstance& instance, std::uint64_t seed,
                                       int index);

/**
 * Guaranteed excess of the exact load at the smoothed minimizer over the
 * optimum: (1/c)(sum_i C(K,i) ln i + K ln N) for the worst case and
 * (1/c) sum_i C(K,i) ln i for the average. Summed in the log domain.
 */
double increment_bound(int k, int n_files, double c, LoadKind kind);

/// Looser closed form: (min{(K/2 - 1) 2^K + 1, (2^K - 1) ln K} + K ln N) / c (the K ln N term for the worst case only).
double increment_bound_closed_form(int k, int n_files, double c, LoadKind kind);

/// CSV with header "start,iteration,smoothed,exact"; off-checkpoint exact values are empty.
void write_smooth_trace_csv(std::ostream& os, const SmoothResult& result);

}  // namespace cdc

#endif  // CDC_SMOOTH_OPT_HPP
