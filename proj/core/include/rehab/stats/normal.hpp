/* Copyright 2026 The Rehab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef REHAB_STATS_NORMAL_HPP_
#define REHAB_STATS_NORMAL_HPP_

namespace rehab::stats {

/// Inverse standard-normal CDF for p in (0, 1); absolute error below 1e-9.
/// Throws std::domain_error outside (0, 1).
double normal_quantile(double p);

/// z such that P(|Z| <= z) = gamma, e.g. 1.959963984540054 for 0.95.
double two_sided_z(double gamma);

}  // namespace rehab::stats

#endif  // REHAB_STATS_NORMAL_HPP_
