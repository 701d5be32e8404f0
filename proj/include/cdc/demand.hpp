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

#ifndef CDC_DEMAND_HPP
#define CDC_DEMAND_HPP

#include "cdc/model.hpp"

#include <cstdint>
#include <vector>

namespace cdc {

/// One requested file index per user of a layout (zero-based files).
using DemandVector = std::vector<int>;

/**
 * A demand vector up to permutations of users inside a tier. The
 * representative lists each tier's requests in nondecreasing order.
 */
struct DemandClass {
  DemandVector representative;
  double multiplicity = 1.0;  // number of raw demand vectors in the class
  double probability = 1.0;   // prod_j p_{n_j} of any single member
};

/// Number of classes, prod_t C(N + K_t - 1, K_t), as a double.
double demand_class_count(const TierLayout& layout, int n_files);

/// Classes in lexicographic order of their representatives.
std::vector<DemandClass> enumerate_demand_classes(const SystemInstance& instance,
                                                  const TierLayout& layout);

/// Throws BudgetError when classes * K * 2^(K-1) subset-term evaluations exceed `budget`.
void check_evaluation_budget(const TierLayout& layout, int n_files, double budget);

/// Per-subset tier counts: counts[mask * T + t] = |mask ∩ tier t|.
std::vector<int> subset_tier_counts(const TierLayout& layout);

}  // namespace cdc

#endif  // CDC_DEMAND_HPP
