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
 * @file simulator.hpp
 * @brief Monte Carlo realization of random placement and coded delivery at a
 * finite granularity.
 *
 * File n is split into llround(V_n * scale) data units. User u caches a
 * uniformly random subset of nearbyint(q * V_n * scale) units of every file.
 * Delivery sends, for every nonempty user subset S, the XOR of the pieces
 * W_{d_j, S \ {j}} zero-padded to the longest one; the load is the total
 * length in units divided by scale.
 */

#ifndef CDC_SIMULATOR_HPP
#define CDC_SIMULATOR_HPP

#include "cdc/demand.hpp"
#include "cdc/model.hpp"

#include <cstdint>
#include <vector>

namespace cdc {

/// Largest number of users the simulator supports (histograms have 2^K bins).
inline constexpr int kMaxSimUsers = 20;

struct PlacementState {
  long scale = 1;
  int n_users = 0;
  std::vector<long> units;                       // units per file
  std::vector<std::vector<std::uint32_t>> holders;  // holders[n][unit]: users caching the unit
  std::vector<std::vector<long>> histogram;      // histogram[n][mask]: units held exactly by mask

  /// Units of file n in user u's cache.
  long cached_units(int user, int n) const;
};

struct DeliveryMeasurement {
  std::vector<long> message_units;  // indexed by subset mask; entry 0 unused
  long total_units = 0;
  double load = 0.0;  // total_units / scale
  DemandVector demand;
};

/// Throws ConfigError if q is infeasible, scale * V_n < 1, or K > kMaxSimUsers.
PlacementState place(const SystemInstance& instance, const TierLayout& layout,
                     const CachingParameter& q, long scale, std::uint64_t seed);

DeliveryMeasurement deliver(const PlacementState& state, const DemandVector& demand);

enum class DemandMode { fixed, popularity };

struct MonteCarloResult {
  double mean = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

/**
 * Mean and standard error of the load over independent trials. Trial i places
 * with a seed derived from (seed, i); in popularity mode it also draws the
 * demand i.i.d. from p. `demand` is used in fixed mode only.
 */
MonteCarloResult monte_carlo(const SystemInstance& instance, const TierLayout& layout,
                             const CachingParameter& q, long scale, long trials,
                             std::uint64_t seed, DemandMode mode,
                             const DemandVector& demand = {});

}  // namespace cdc

#endif  // CDC_SIMULATOR_HPP
