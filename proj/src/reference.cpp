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

#include "cdc/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cdc::reference {

namespace {

// Sum over nonempty subsets of max_j term (c == 0) or of LSE_j term (c > 0).
double inner_sum(const SystemInstance& instance, const TierLayout& layout,
                 const CachingParameter& q, const DemandVector& d, double c) {
  const int k = layout.total();
  double total = 0.0;
  std::vector<double> terms;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    terms.clear();
    for (int j = 0; j < k; ++j) {
      if ((mask >> j) & 1U) terms.push_back(subset_term(instance, layout, q, d, mask, j));
    }
    total += c > 0.0 ? log_sum_exp(terms, c) : *std::max_element(terms.begin(), terms.end());
  }
  return total;
}

// Calls visit(d, prob) for every raw demand vector in lexicographic order.
template <typename Visit>
void for_each_demand(const SystemInstance& instance, const TierLayout& layout, Visit visit) {
  const int k = layout.total();
  const int n = instance.n_files();
  DemandVector d(k, 0);
  while (true) {
    double prob = 1.0;
    for (int f : d) prob *= instance.popularity(f);
    visit(d, prob);
    int u = k - 1;
    while (u >= 0 && d[u] == n - 1) d[u--] = 0;
    if (u < 0) return;
    ++d[u];
  }
}

}  // namespace

double worst_case_load(const SystemInstance& instance, const TierLayout& layout,
                       const CachingParameter& q) {
  double best = 0.0;
  for_each_demand(instance, layout, [&](const DemandVector& d, double) {
    best = std::max(best, inner_sum(instance, layout, q, d, 0.0));
  });
  return best;
}

double average_load(const SystemInstance& instance, const TierLayout& layout,
                    const CachingParameter& q) {
  double total = 0.0;
  for_each_demand(instance, layout, [&](const DemandVector& d, double prob) {
    total += prob * inner_sum(instance, layout, q, d, 0.0);
  });
  return total;
}

double smoothed_worst_case(const SystemInstance& instance, const TierLayout& layout,
                           const CachingParameter& q, double c) {
  std::vector<double> x;
  for_each_demand(instance, layout, [&](const DemandVector& d, double) {
    x.push_back(inner_sum(instance, layout, q, d, c));
  });
  return log_sum_exp(x, c);
}

double smoothed_average(const SystemInstance& instance, const TierLayout& layout,
                        const CachingParameter& q, double c) {
  double total = 0.0;
  for_each_demand(instance, layout, [&](const DemandVector& d, double prob) {
    total += prob * inner_sum(instance, layout, q, d, c);
  });
  return total;
}

}  // namespace cdc::reference
