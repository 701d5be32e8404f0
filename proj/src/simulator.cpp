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

#include "cdc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cdc {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t a, std::uint32_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), a, b};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n) by Lemire's multiply-and-reject.
long uniform_below(std::mt19937_64& rng, long n) {
  const auto range = static_cast<std::uint64_t>(n);
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = -range % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<long>(m >> 64);
}

// Floyd's sampling of a uniform k-subset of [0, n); marks[i] is set for chosen i.
void floyd_sample(std::mt19937_64& rng, long n, long k, std::vector<char>& marks) {
  marks.assign(n, 0);
  for (long j = n - k; j < n; ++j) {
    const long t = uniform_below(rng, j + 1);
    if (marks[t]) {
      marks[j] = 1;
    } else {
      marks[t] = 1;
    }
  }
}

}  // namespace

long PlacementState::cached_units(int user, int n) const {
  long count = 0;
  const auto& h = histogram[n];
  for (std::size_t mask = 0; mask < h.size(); ++mask) {
    if (mask >> user & 1U) count += h[mask];
  }
  return count;
}

PlacementState place(const SystemInstance& instance, const TierLayout& layout,
                     const CachingParameter& q, long scale, std::uint64_t seed) {
  const int n_files = instance.n_files();
  const int n_users = layout.total();
  if (layout.n_tiers() != instance.n_tiers())
    throw ConfigError("layout and instance have different tier counts");
  if (n_users > kMaxSimUsers)
    throw ConfigError("the simulator supports at most " + std::to_string(kMaxSimUsers) + " users");
  if (q.n_tiers() != instance.n_tiers() || q.n_files() != n_files)
    throw ConfigError("caching parameter has the wrong shape");
  if (!check_feasible(instance, q)) throw ConfigError("caching parameter is infeasible");
  if (scale < 1) throw ConfigError("scale must be positive");

  PlacementState state;
  state.scale = scale;
  state.n_users = n_users;
  state.units.resize(n_files);
  for (int n = 0; n < n_files; ++n) {
    state.units[n] = std::llround(instance.file_size(n) * static_cast<double>(scale));
    if (state.units[n] < 1)
      throw ConfigError("scale too small: file " + std::to_string(n) + " has no data units");
  }
  state.holders.resize(n_files);
  state.histogram.resize(n_files);

#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < n_files; ++n) {
    const long units = state.units[n];
    std::vector<std::uint32_t>& holders = state.holders[n];
    holders.assign(units, 0);
    std::vector<char> marks;
    for (int u = 0; u < n_users; ++u) {
      const int t = layout.tier_of(u);
      const double target = std::clamp(q(t, n), 0.0, 1.0) * instance.file_size(n) * scale;
      const long k = std::min(units, static_cast<long>(std::nearbyint(target)));
      if (k <= 0) continue;
      std::mt19937_64 rng = make_rng(seed, static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(n));
      // Sample the smaller of the subset and its complement.
      const bool complement = k > units / 2;
      floyd_sample(rng, units, complement ? units - k : k, marks);
      const std::uint32_t bit = 1U << u;
      for (long i = 0; i < units; ++i) {
        if (static_cast<bool>(marks[i]) != complement) holders[i] |= bit;
      }
    }
    std::vector<long>& hist = state.histogram[n];
    hist.assign(std::size_t{1} << n_users, 0);
    for (const std::uint32_t h : holders) ++hist[h];
  }
  return state;
}

DeliveryMeasurement deliver(const PlacementState& state, const DemandVector& demand) {
  const int k = state.n_users;
  if (static_cast<int>(demand.size()) != k)
    throw ConfigError("demand length " + std::to_string(demand.size()) + " differs from " +
                      std::to_string(k) + " users");
  for (const int d : demand) {
    if (d < 0 || d >= static_cast<int>(state.units.size()))
      throw ConfigError("demand names a file outside the library");
  }
  DeliveryMeasurement out;
  out.demand = demand;
  const std::uint32_t full = (std::uint32_t{1} << k) - 1;
  out.message_units.assign(std::size_t{full} + 1, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    long longest = 0;
    for (int j = 0; j < k; ++j) {
      if (!(s >> j & 1U)) continue;
      // Units of file d_j held by exactly the other members of S.
      longest = std::max(longest, state.histogram[demand[j]][s & ~(1U << j)]);
    }
    out.message_units[s] = longest;
    out.total_units += longest;
  }
  out.load = static_cast<double>(out.total_units) / static_cast<double>(state.scale);
  return out;
}

MonteCarloResult monte_carlo(const SystemInstance& instance, const TierLayout& layout,
                             const CachingParameter& q, long scale, long trials,
                             std::uint64_t seed, DemandMode mode, const DemandVector& demand) {
  if (trials < 2) throw ConfigError("monte_carlo needs at least 2 trials");
  const int k = layout.total();
  if (mode == DemandMode::fixed && static_cast<int>(demand.size()) != k)
    throw ConfigError("fixed-demand mode needs a demand of length " + std::to_string(k));
  std::vector<double> cdf(instance.n_files());
  double acc = 0.0;
  for (int n = 0; n < instance.n_files(); ++n) cdf[n] = acc += instance.popularity(n);

  std::vector<double> loads(trials);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < trials; ++i) {
    std::mt19937_64 rng = make_rng(seed, static_cast<std::uint32_t>(i), 0xffffffffU);
    const std::uint64_t trial_seed = rng();
    DemandVector d = demand;
    if (mode == DemandMode::popularity) {
      d.resize(k);
      for (int u = 0; u < k; ++u) {
        const double x = uniform01(rng) * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        d[u] = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), instance.n_files() - 1));
      }
    }
    loads[i] = deliver(place(instance, layout, q, scale, trial_seed), d).load;
  }

  // Welford in trial order.
  MonteCarloResult out;
  double mean = 0.0;
  double m2 = 0.0;
  for (long i = 0; i < trials; ++i) {
    const double delta = loads[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (loads[i] - mean);
  }
  out.mean = mean;
  out.trials = trials;
  out.std_error = std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials));
  return out;
}

}  // namespace cdc
