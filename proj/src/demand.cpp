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

#include "cdc/demand.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace cdc {

namespace {

double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Advances a nondecreasing sequence over [0, n_files) to its lexicographic
// successor; returns false after the last one.
bool next_multiset(std::vector<int>::iterator first, std::vector<int>::iterator last,
                   int n_files) {
  for (auto it = last; it != first;) {
    --it;
    if (*it + 1 < n_files) {
      const int v = *it + 1;
      for (auto jt = it; jt != last; ++jt) *jt = v;
      return true;
    }
  }
  return false;
}

}  // namespace

double demand_class_count(const TierLayout& layout, int n_files) {
  double log_count = 0.0;
  for (int k : layout.counts()) log_count += log_binomial(n_files + k - 1.0, k);
  return std::round(std::exp(log_count));
}

void check_evaluation_budget(const TierLayout& layout, int n_files, double budget) {
  const int k = layout.total();
  const double evals = demand_class_count(layout, n_files) * k * std::ldexp(1.0, k - 1);
  if (k > 30 || evals > budget) {
    std::ostringstream os;
    os << "exact evaluation needs " << evals << " subset-term evaluations (budget " << budget
       << "); use the smoothed path or the simulator";
    throw BudgetError(os.str());
  }
}

std::vector<DemandClass> enumerate_demand_classes(const SystemInstance& instance,
                                                  const TierLayout& layout) {
  const int n_files = instance.n_files();
  const int k = layout.total();
  const int n_tiers = layout.n_tiers();

  std::vector<double> log_factorial(k + 1, 0.0);
  for (int i = 1; i <= k; ++i) log_factorial[i] = log_factorial[i - 1] + std::log(i);

  std::vector<DemandClass> classes;
  classes.reserve(static_cast<std::size_t>(demand_class_count(layout, n_files)));
  DemandVector d(k, 0);
  std::vector<int> run(n_files);
  while (true) {
    DemandClass c;
    c.representative = d;
    double log_mult = 0.0;
    double prob = 1.0;
    for (int t = 0; t < n_tiers; ++t) {
      if (layout.count(t) == 0) continue;
      std::fill(run.begin(), run.end(), 0);
      for (int u = layout.begin(t); u < layout.end(t); ++u) ++run[d[u]];
      log_mult += log_factorial[layout.count(t)];
      for (int r : run) log_mult -= log_factorial[r];
    }
    for (int u = 0; u < k; ++u) prob *= instance.popularity(d[u]);
    c.multiplicity = std::round(std::exp(log_mult));
    c.probability = prob;
    classes.push_back(std::move(c));

    // Odometer over tiers: the last tier moves fastest.
    int t = n_tiers - 1;
    for (; t >= 0; --t) {
      auto first = d.begin() + layout.begin(t);
      auto last = d.begin() + layout.end(t);
      if (first != last && next_multiset(first, last, n_files)) break;
      std::fill(first, last, 0);
    }
    if (t < 0) break;
  }
  return classes;
}

std::vector<int> subset_tier_counts(const TierLayout& layout) {
  const int k = layout.total();
  const int n_tiers = layout.n_tiers();
  const std::uint64_t n_masks = std::uint64_t{1} << k;
  std::vector<int> counts(n_masks * n_tiers, 0);
  for (std::uint64_t mask = 1; mask < n_masks; ++mask) {
    const int low = std::countr_zero(mask);
    const std::uint64_t rest = mask & (mask - 1);
    for (int t = 0; t < n_tiers; ++t) counts[mask * n_tiers + t] = counts[rest * n_tiers + t];
    ++counts[mask * n_tiers + layout.tier_of(low)];
  }
  return counts;
}

}  // namespace cdc
