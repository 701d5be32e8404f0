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

#include "cdc/converse.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cdc {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

cpp_int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  cpp_int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// distinct_demand_weight(n_prime, m) for m = 0..m_max, from one pass over the
// Stirling triangle.
std::vector<double> distinct_weights(int n_prime, int m_max) {
  std::vector<double> out(m_max + 1, 0.0);
  std::vector<cpp_int> coeff(m_max + 1);  // C(N'-1, j-1) j!
  cpp_int fact = 1;
  for (int j = 1; j <= m_max; ++j) {
    fact *= j;
    coeff[j] = binomial(n_prime - 1, j - 1) * fact;
  }
  std::vector<cpp_int> row(m_max + 1, 0);  // S(m, j)
  row[0] = 1;
  cpp_int power = 1;
  for (int m = 1; m <= m_max; ++m) {
    for (int j = m; j >= 1; --j) row[j] = j * row[j] + row[j - 1];
    row[0] = 0;
    power *= n_prime;
    cpp_int num = 0;
    for (int j = 1; j <= m; ++j) num += coeff[j] * row[j];
    out[m] = cpp_rational(num, power).convert_to<double>();
  }
  return out;
}

void check_active(const SystemInstance& instance, const ActiveSet& active) {
  if (active.n_tiers() != instance.n_tiers())
    throw ConfigError("active set has " + std::to_string(active.n_tiers()) +
                      " tiers, instance has " + std::to_string(instance.n_tiers()));
  if (active.total() < 1) throw ConfigError("converse bounds need at least one active user");
}

// Cache sizes of the active users in increasing order.
std::vector<double> sorted_caches(const SystemInstance& instance, const ActiveSet& active) {
  std::vector<double> caches;
  caches.reserve(active.total());
  for (int t = 0; t < instance.n_tiers(); ++t)
    caches.insert(caches.end(), active.count(t), instance.cache_size(t));
  std::sort(caches.begin(), caches.end());
  return caches;
}

// Uniform bound over sorted caches with precomputed weights.
double uniform_bound(std::span<const double> sorted, int n_prime, double library,
                     std::span<const double> weights) {
  const int m_max = std::min<int>(n_prime, static_cast<int>(sorted.size()));
  double best = 0.0;
  double prefix = 0.0;      // sum_{i<=m} M_[i]
  double nested = 0.0;      // sum_{l<=m} sum_{i<=l} M_[i]
  for (int m = 1; m <= m_max; ++m) {
    prefix += sorted[m - 1];
    nested += prefix;
    const double keep = 1.0 - std::pow(1.0 - 1.0 / n_prime, m);
    const double cut = std::min(nested / n_prime, keep * prefix);
    best = std::max(best, weights[m] * library - cut);
  }
  return best;
}

}  // namespace

cpp_int stirling2(int m, int j) {
  if (m < 0 || j < 0) return 0;
  if (j > m) return 0;
  std::vector<cpp_int> row(m + 1, 0);
  row[0] = 1;
  for (int r = 1; r <= m; ++r) {
    for (int k = r; k >= 1; --k) row[k] = k * row[k] + row[k - 1];
    row[0] = 0;
  }
  return row[j];
}

double distinct_demand_weight(int n_prime, int m) {
  if (n_prime < 1 || m < 0) throw ConfigError("distinct_demand_weight needs N' >= 1 and m >= 0");
  return distinct_weights(n_prime, m)[m];
}

ConverseValue converse_worst_case(const SystemInstance& instance, const ActiveSet& active) {
  check_active(instance, active);
  const std::vector<double> caches = sorted_caches(instance, active);
  const int n = instance.n_files();
  const double library = instance.total_file_size();
  const int m_max = std::min(n, active.total());
  ConverseValue out;
  double prefix = 0.0;
  double nested = 0.0;  // sum_{l<=m} (sum_{i<=l} M_[i]) / (N - l + 1)
  for (int m = 1; m <= m_max; ++m) {
    prefix += caches[m - 1];
    nested += prefix / (n - m + 1);
    const double frac = static_cast<double>(m) / n;
    const double v = frac * library - std::min(nested, frac * prefix);
    if (v > out.value) {
      out.value = v;
      out.best_m = m;
    }
  }
  return out;
}

double converse_average_uniform(std::span<const double> caches, int n_prime,
                                const SystemInstance& instance) {
  if (n_prime < 1 || n_prime > instance.n_files())
    throw ConfigError("N' must lie in [1, N]");
  if (caches.empty()) throw ConfigError("the uniform bound needs at least one user");
  std::vector<double> sorted(caches.begin(), caches.end());
  std::sort(sorted.begin(), sorted.end());
  double library = 0.0;
  for (int i = 0; i < n_prime; ++i) library += instance.file_size(i);
  const int m_max = std::min<int>(n_prime, static_cast<int>(sorted.size()));
  return uniform_bound(sorted, n_prime, library, distinct_weights(n_prime, m_max));
}

ConverseValue converse_average(const SystemInstance& instance, const ActiveSet& active,
                               double max_compositions) {
  check_active(instance, active);
  const int n_tiers = instance.n_tiers();
  double compositions = 1.0;
  for (int t = 0; t < n_tiers; ++t) compositions *= active.count(t) + 1.0;
  if (compositions > max_compositions)
    throw BudgetError("converse_average: " + std::to_string(compositions) +
                      " tier compositions exceed the budget of " +
                      std::to_string(max_compositions));

  // Compositions s (users taken per tier) with their multiplicity prod_t C(K_t, s_t).
  struct Composition {
    std::vector<double> caches;  // increasing
    double multiplicity;
  };
  std::vector<std::vector<cpp_int>> binom(n_tiers);
  for (int t = 0; t < n_tiers; ++t)
    for (int s = 0; s <= active.count(t); ++s) binom[t].push_back(binomial(active.count(t), s));
  std::vector<Composition> comps;
  std::vector<int> s(n_tiers, 0);
  while (true) {
    int size = 0;
    for (int t = 0; t < n_tiers; ++t) size += s[t];
    if (size > 0) {
      Composition c;
      cpp_int mult = 1;
      for (int t = 0; t < n_tiers; ++t) {
        c.caches.insert(c.caches.end(), s[t], instance.cache_size(t));
        mult *= binom[t][s[t]];
      }
      c.multiplicity = mult.convert_to<double>();
      comps.push_back(std::move(c));
    }
    int t = 0;
    while (t < n_tiers && s[t] == active.count(t)) s[t++] = 0;
    if (t == n_tiers) break;
    ++s[t];
  }

  const int n = instance.n_files();
  const int users = active.total();
  std::vector<double> value(n, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int np = 1; np <= n; ++np) {
    const double a = std::clamp(np * instance.popularity(np - 1), 0.0, 1.0);
    double library = 0.0;
    for (int i = 0; i < np; ++i) library += instance.file_size(i);
    const std::vector<double> weights = distinct_weights(np, std::min(np, users));
    double sum = 0.0;
    for (const Composition& c : comps) {
      const int i = static_cast<int>(c.caches.size());
      // std::pow(0, 0) is 1.
      const double w = std::pow(a, i) * std::pow(1.0 - a, users - i);
      if (w == 0.0) continue;
      sum += w * c.multiplicity * uniform_bound(c.caches, np, library, weights);
    }
    value[np - 1] = sum;
  }
  ConverseValue out;
  for (int np = 1; np <= n; ++np) {
    if (value[np - 1] > out.value) {
      out.value = value[np - 1];
      out.best_nprime = np;
    }
  }
  return out;
}

}  // namespace cdc
