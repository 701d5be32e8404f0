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

// Serial reference implementations. They walk all N^K demand vectors and all
// subsets directly from the definition, with no symmetry reduction, no
// tabulation and no threading. Tests and benchmarks compare the production
// kernels against them.

#ifndef CDC_REFERENCE_HPP
#define CDC_REFERENCE_HPP

#include "cdc/load_eval.hpp"

namespace cdc::reference {

double worst_case_load(const SystemInstance& instance, const TierLayout& layout,
                       const CachingParameter& q);

double average_load(const SystemInstance& instance, const TierLayout& layout,
                    const CachingParameter& q);

double smoothed_worst_case(const SystemInstance& instance, const TierLayout& layout,
                           const CachingParameter& q, double c);

double smoothed_average(const SystemInstance& instance, const TierLayout& layout,
                        const CachingParameter& q, double c);

}  // namespace cdc::reference

#endif  // CDC_REFERENCE_HPP
