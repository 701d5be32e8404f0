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

#include "cdc/baselines.hpp"

#include <algorithm>

namespace cdc {

namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

double min_cache(const SystemInstance& instance) {
  return *std::min_element(instance.cache_sizes().begin(), instance.cache_sizes().end());
}

}  // namespace

CachingParameter uniform_min_cache_max_file(const SystemInstance& instance) {
  const double v = min_cache(instance) / (instance.n_files() * instance.max_file_size());
  return CachingParameter(instance.n_tiers(), instance.n_files(), clip01(v));
}

CachingParameter tier_uniform_max_file(const SystemInstance& instance) {
  CachingParameter q(instance.n_tiers(), instance.n_files());
  const double denom = instance.n_files() * instance.max_file_size();
  for (int t = 0; t < instance.n_tiers(); ++t)
    q.matrix().row(t).setConstant(clip01(instance.cache_size(t) / denom));
  return q;
}

CachingParameter file_uniform_min_cache(const SystemInstance& instance) {
  const double v = min_cache(instance) / instance.total_file_size();
  return CachingParameter(instance.n_tiers(), instance.n_files(), clip01(v));
}

std::vector<NamedScheme> baseline_schemes(const SystemInstance& instance) {
  return {{"uniform-alidec", uniform_min_cache_max_file(instance)},
          {"tier-uniform", tier_uniform_max_file(instance)},
          {"file-uniform", file_uniform_min_cache(instance)}};
}

CachingParameter baseline_by_id(const std::string& id, const SystemInstance& instance) {
  for (auto& s : baseline_schemes(instance)) {
    if (s.id == id) return std::move(s.q);
  }
  throw ConfigError("unknown baseline scheme '" + id + "'");
}

}  // namespace cdc
