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

#include "cdc/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace cdc {

namespace {

constexpr double kPopularitySumTolerance = 1e-12;

std::string describe_index(const char* what, int i) {
  std::ostringstream os;
  os << what << " " << i;
  return os.str();
}

}  // namespace

SystemInstance::SystemInstance(std::vector<double> file_sizes,
                               std::vector<double> tier_cache_sizes,
                               std::vector<int> tier_user_counts,
                               std::vector<double> popularity)
    : file_sizes_(std::move(file_sizes)),
      cache_sizes_(std::move(tier_cache_sizes)),
      user_counts_(std::move(tier_user_counts)),
      popularity_(std::move(popularity)) {
  if (file_sizes_.empty()) throw ConfigError("instance needs at least one file");
  if (cache_sizes_.empty()) throw ConfigError("instance needs at least one cache tier");
  if (user_counts_.size() != cache_sizes_.size())
    throw ConfigError("tier_user_counts and tier_cache_sizes differ in length");
  if (popularity_.size() != file_sizes_.size())
    throw ConfigError("popularity and file_sizes differ in length");

  for (int n = 0; n < n_files(); ++n) {
    if (!(file_sizes_[n] > 0.0) || !std::isfinite(file_sizes_[n]))
      throw ConfigError(describe_index("non-positive size for file", n + 1));
  }
  total_size_ = std::accumulate(file_sizes_.begin(), file_sizes_.end(), 0.0);

  for (int t = 0; t < n_tiers(); ++t) {
    const double m = cache_sizes_[t];
    if (!(m >= 0.0) || m > total_size_ * (1.0 + 1e-12))
      throw ConfigError(describe_index("cache size outside [0, sum V] for tier", t + 1));
    if (t > 0 && !(m > cache_sizes_[t - 1]))
      throw ConfigError("tier cache sizes must be strictly increasing");
    if (user_counts_[t] < 0) throw ConfigError(describe_index("negative user count for tier", t + 1));
  }

  double sum_p = 0.0;
  for (int n = 0; n < n_files(); ++n) {
    if (!(popularity_[n] >= 0.0)) throw ConfigError("popularity entries must be nonnegative");
    if (n > 0 && popularity_[n] > popularity_[n - 1] * (1.0 + 1e-12) + 1e-15)
      throw ConfigError("popularity must be nonincreasing in the file index");
    sum_p += popularity_[n];
  }
  if (std::abs(sum_p - 1.0) > kPopularitySumTolerance)
    throw ConfigError("popularity must sum to 1");
}

SystemInstance SystemInstance::from_user_caches(std::vector<double> file_sizes,
                                                std::span<const double> user_cache_sizes,
                                                std::vector<double> popularity) {
  std::map<double, int> tiers;
  for (double m : user_cache_sizes) ++tiers[m];
  std::vector<double> sizes;
  std::vector<int> counts;
  for (const auto& [m, count] : tiers) {
    sizes.push_back(m);
    counts.push_back(count);
  }
  return SystemInstance(std::move(file_sizes), std::move(sizes), std::move(counts),
                        std::move(popularity));
}

double SystemInstance::max_file_size() const {
  return *std::max_element(file_sizes_.begin(), file_sizes_.end());
}

TierLayout::TierLayout(std::vector<int> per_tier_counts) : counts_(std::move(per_tier_counts)) {
  if (counts_.empty()) throw ConfigError("layout needs at least one tier");
  cumulative_.resize(counts_.size());
  for (std::size_t t = 0; t < counts_.size(); ++t) {
    if (counts_[t] < 0) throw ConfigError("layout counts must be nonnegative");
    total_ += counts_[t];
    cumulative_[t] = total_;
    tier_of_.insert(tier_of_.end(), counts_[t], static_cast<int>(t));
  }
  if (total_ < 1) throw ConfigError("layout needs at least one user");
}

FeasibilityReport check_feasible(const SystemInstance& instance, const CachingParameter& q,
                                 double tol) {
  if (q.n_tiers() != instance.n_tiers() || q.n_files() != instance.n_files())
    throw ConfigError("caching parameter shape does not match the instance");

  FeasibilityReport report;
  report.tier_usage.assign(instance.n_tiers(), 0.0);
  for (int t = 0; t < instance.n_tiers(); ++t) {
    double used = 0.0;
    for (int n = 0; n < instance.n_files(); ++n) {
      const double v = q(t, n);
      if (!(v >= -tol && v <= 1.0 + tol)) report.out_of_range.emplace_back(t, n);
      used += v * instance.file_size(n);
    }
    report.tier_usage[t] = used;
    if (used > instance.cache_size(t) + tol)
      report.over_budget.push_back({t, used, instance.cache_size(t)});
  }
  report.feasible = report.out_of_range.empty() && report.over_budget.empty();
  return report;
}

std::vector<double> zipf_popularity(int n_files, double gamma) {
  if (n_files < 1) throw ConfigError("zipf_popularity needs at least one file");
  if (!(gamma >= 0.0)) throw ConfigError("Zipf exponent must be nonnegative");
  std::vector<double> p(n_files);
  for (int n = 0; n < n_files; ++n) p[n] = std::pow(static_cast<double>(n + 1), -gamma);
  // Summing smallest first keeps the normalization error well below 1e-12.
  double total = 0.0;
  for (int n = n_files - 1; n >= 0; --n) total += p[n];
  for (double& v : p) v /= total;
  return p;
}

SystemInstance build_arithmetic_scenario(const ArithmeticScenario& s) {
  if (s.n_files < 1 || s.n_tiers < 1) throw ConfigError("scenario needs N >= 1 and T >= 1");
  std::vector<double> v(s.n_files);
  for (int n = 0; n < s.n_files; ++n) v[n] = s.first_file_size + n * s.file_size_step;
  std::vector<double> m(s.n_tiers);
  for (int t = 0; t < s.n_tiers; ++t) m[t] = s.first_cache_size + t * s.cache_size_step;
  std::vector<int> counts = s.tier_user_counts;
  if (counts.empty()) counts.assign(s.n_tiers, 1);
  if (static_cast<int>(counts.size()) != s.n_tiers)
    throw ConfigError("tier_user_counts must have one entry per tier");
  // Equal cache sizes (dM = 0) form one tier.
  std::vector<double> merged_m;
  std::vector<int> merged_counts;
  for (int t = 0; t < s.n_tiers; ++t) {
    if (!merged_m.empty() && m[t] == merged_m.back()) {
      merged_counts.back() += counts[t];
    } else {
      merged_m.push_back(m[t]);
      merged_counts.push_back(counts[t]);
    }
  }
  return SystemInstance(std::move(v), std::move(merged_m), std::move(merged_counts),
                        zipf_popularity(s.n_files, s.zipf_gamma));
}

TierLayout expected_active_layout(std::span<const double> activity_prob,
                                  std::span<const int> tier_user_counts) {
  if (activity_prob.size() != tier_user_counts.size())
    throw ConfigError("one activity probability per tier is required");
  std::vector<int> k(tier_user_counts.size());
  int total = 0;
  for (std::size_t t = 0; t < k.size(); ++t) {
    const double p = activity_prob[t];
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("activity probability outside [0, 1]");
    // The small offset keeps products such as 0.1 * 30 from rounding up to 4.
    k[t] = static_cast<int>(std::ceil(p * tier_user_counts[t] - 1e-9));
    total += k[t];
  }
  if (total < 1) throw ConfigError("every tier rounds to zero expected active users");
  return TierLayout(std::move(k));
}

TierLayout expected_active_layout(double activity_prob, std::span<const int> tier_user_counts) {
  std::vector<double> p(tier_user_counts.size(), activity_prob);
  return expected_active_layout(p, tier_user_counts);
}

TierLayout full_layout(const SystemInstance& instance) {
  return TierLayout(std::vector<int>(instance.user_counts().begin(), instance.user_counts().end()));
}

}  // namespace cdc
