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
 * @file model.hpp
 * @brief System description for decentralized coded caching with
 * heterogeneous file sizes and cache sizes.
 *
 * A system has N files of (real-valued) sizes V_n, T cache tiers with strictly
 * increasing cache sizes and a user count per tier, and a nonincreasing file
 * popularity. The caching parameter q (T x N) gives, for each tier, the
 * fraction of every file each user of that tier caches.
 *
 * Indices are zero-based throughout the library.
 */

#ifndef CDC_MODEL_HPP
#define CDC_MODEL_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdc {

/// Invalid user input (bad scenario, bad config). The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exact computation would exceed its enumeration budget. Exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SystemInstance {
 public:
  SystemInstance(std::vector<double> file_sizes, std::vector<double> tier_cache_sizes,
                 std::vector<int> tier_user_counts, std::vector<double> popularity);

  /// Builds tiers from per-user cache sizes; users with equal cache size share a tier.
  static SystemInstance from_user_caches(std::vector<double> file_sizes,
                                         std::span<const double> user_cache_sizes,
                                         std::vector<double> popularity);

  int n_files() const { return static_cast<int>(file_sizes_.size()); }
  int n_tiers() const { return static_cast<int>(cache_sizes_.size()); }

  double file_size(int n) const { return file_sizes_[n]; }
  std::span<const double> file_sizes() const { return file_sizes_; }
  double total_file_size() const { return total_size_; }
  double max_file_size() const;

  double cache_size(int t) const { return cache_sizes_[t]; }
  std::span<const double> cache_sizes() const { return cache_sizes_; }

  int user_count(int t) const { return user_counts_[t]; }
  std::span<const int> user_counts() const { return user_counts_; }

  double popularity(int n) const { return popularity_[n]; }
  std::span<const double> popularity() const { return popularity_; }

 private:
  std::vector<double> file_sizes_;
  std::vector<double> cache_sizes_;
  std::vector<int> user_counts_;
  std::vector<double> popularity_;
  double total_size_ = 0.0;
};

/**
 * Active (or assumed-active) user counts per tier. Users are numbered
 * consecutively tier by tier, so tier t owns users [begin(t), end(t)).
 */
class TierLayout {
 public:
  explicit TierLayout(std::vector<int> per_tier_counts);

  int n_tiers() const { return static_cast<int>(counts_.size()); }
  int total() const { return total_; }
  int count(int t) const { return counts_[t]; }
  std::span<const int> counts() const { return counts_; }

  /// Prefix sums: cumulative(t) = number of users in tiers 0..t.
  int cumulative(int t) const { return cumulative_[t]; }
  int begin(int t) const { return t == 0 ? 0 : cumulative_[t - 1]; }
  int end(int t) const { return cumulative_[t]; }

  int tier_of(int user) const { return tier_of_[user]; }

  bool operator==(const TierLayout&) const = default;

 private:
  std::vector<int> counts_;
  std::vector<int> cumulative_;
  std::vector<int> tier_of_;
  int total_ = 0;
};

/// T x N caching fractions. Shape is fixed; feasibility is checked separately.
class CachingParameter {
 public:
  CachingParameter(int n_tiers, int n_files, double fill = 0.0)
      : q_(Eigen::MatrixXd::Constant(n_tiers, n_files, fill)) {}
  explicit CachingParameter(Eigen::MatrixXd q) : q_(std::move(q)) {}

  int n_tiers() const { return static_cast<int>(q_.rows()); }
  int n_files() const { return static_cast<int>(q_.cols()); }

  double operator()(int t, int n) const { return q_(t, n); }
  double& operator()(int t, int n) { return q_(t, n); }

  const Eigen::MatrixXd& matrix() const { return q_; }
  Eigen::MatrixXd& matrix() { return q_; }

 private:
  Eigen::MatrixXd q_;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

struct TierBudgetViolation {
  int tier;
  double used;
  double capacity;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::pair<int, int>> out_of_range;  // (t, n) with q outside [0, 1]
  std::vector<TierBudgetViolation> over_budget;
  std::vector<double> tier_usage;  // sum_n q(t,n) V_n for every tier

  explicit operator bool() const { return feasible; }
};

/// Checks 0 <= q <= 1 and the per-tier memory constraint, both within `tol`.
FeasibilityReport check_feasible(const SystemInstance& instance, const CachingParameter& q,
                                 double tol = kFeasibilityTolerance);

/// p_n proportional to n^-gamma (n counted from 1).
std::vector<double> zipf_popularity(int n_files, double gamma);

struct ArithmeticScenario {
  double first_file_size = 1.0;  // V1
  double file_size_step = 0.0;   // dV
  int n_files = 1;
  double first_cache_size = 0.0;  // M1
  double cache_size_step = 0.0;   // dM
  int n_tiers = 1;
  double zipf_gamma = 0.0;
  std::vector<int> tier_user_counts;  // empty means one user per tier
};

/// V_n = V1 + n dV, M_t = M1 + t dM (zero-based n, t), Zipf popularity. Tiers with
/// equal cache sizes merge into one tier with the summed user count.
SystemInstance build_arithmetic_scenario(const ArithmeticScenario& s);

/// K_t = ceil(prob_t * L_t). Throws when every tier rounds to zero.
TierLayout expected_active_layout(std::span<const double> activity_prob,
                                  std::span<const int> tier_user_counts);
TierLayout expected_active_layout(double activity_prob, std::span<const int> tier_user_counts);

/// Every user of every tier active.
TierLayout full_layout(const SystemInstance& instance);

}  // namespace cdc

#endif  // CDC_MODEL_HPP
