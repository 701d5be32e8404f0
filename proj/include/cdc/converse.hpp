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
 * @file converse.hpp
 * @brief Lower bounds on the minimum worst-case and average load that hold for
 * any placement, coded or uncoded.
 *
 * M_[i] below is the i-th smallest cache size among the users considered.
 * Negative inner expressions are clamped to 0 before the outer max.
 */

#ifndef CDC_CONVERSE_HPP
#define CDC_CONVERSE_HPP

#include "cdc/model.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <span>

namespace cdc {

/// Active users per tier.
using ActiveSet = TierLayout;

struct ConverseValue {
  double value = 0.0;
  int best_m = 0;       // maximizing m, worst-case bound only (0 when all clamp to 0)
  int best_nprime = 0;  // maximizing N' (average bound only)
};

/// Stirling number of the second kind S(m, j).
boost::multiprecision::cpp_int stirling2(int m, int j);

/// sum_j C(N'-1, j-1) j! S(m, j) / N'^m, computed exactly then rounded.
double distinct_demand_weight(int n_prime, int m);

/**
 * max over m <= min(N, L_a) of (m/N) sum V - min{sum_{l<=m} sum_{i<=l} M_[i] / (N-l+1),
 * (m/N) sum_{i<=m} M_[i]}.
 */
ConverseValue converse_worst_case(const SystemInstance& instance, const ActiveSet& active);

/**
 * Bound for uniform demands over the N' most popular files, for the users whose
 * cache sizes are `caches` (any order). m runs up to min(N', caches.size()).
 */
double converse_average_uniform(std::span<const double> caches, int n_prime,
                                const SystemInstance& instance);

/**
 * max over N' of sum_{i>=1} (N' p_N')^i (1 - N' p_N')^(L_a - i) sum_{|S|=i} uniform bound(S, N').
 * Subsets are grouped by per-tier composition with exact multiplicities.
 * Throws BudgetError when there are more than `max_compositions` compositions.
 */
ConverseValue converse_average(const SystemInstance& instance, const ActiveSet& active,
                               double max_compositions = 5e6);

}  // namespace cdc

#endif  // CDC_CONVERSE_HPP
