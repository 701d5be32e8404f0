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

// Uniform-parameter members of the q family, adapted to unequal sizes by
// substituting the largest file size and/or the smallest cache size into the
// equal-size formulas. Every output satisfies the memory constraint.

#ifndef CDC_BASELINES_HPP
#define CDC_BASELINES_HPP

#include "cdc/model.hpp"

#include <string>
#include <vector>

namespace cdc {

/// q = min_t M_t / (N max V) for every tier and file, clipped to [0, 1].
CachingParameter uniform_min_cache_max_file(const SystemInstance& instance);

/// q_t = M_t / (N max V) for every file, clipped to [0, 1].
CachingParameter tier_uniform_max_file(const SystemInstance& instance);

/// q = min_t M_t / sum V for every tier and file, clipped to [0, 1].
CachingParameter file_uniform_min_cache(const SystemInstance& instance);

struct NamedScheme {
  std::string id;
  CachingParameter q;
};

/// All baselines with their CLI identifiers, in a fixed order.
std::vector<NamedScheme> baseline_schemes(const SystemInstance& instance);

/// Looks up a baseline by identifier; throws ConfigError for unknown names.
CachingParameter baseline_by_id(const std::string& id, const SystemInstance& instance);

}  // namespace cdc

#endif  // CDC_BASELINES_HPP
