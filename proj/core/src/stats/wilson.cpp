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
#include "rehab/stats/wilson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rehab/stats/normal.hpp"

namespace rehab::stats {

Interval wilson_interval(std::int64_t k, std::int64_t n, double gamma) {
  if (n <= 0) throw std::domain_error("wilson_interval: n must be positive");
  if (k < 0 || k > n) throw std::domain_error("wilson_interval: k must lie in [0, n]");
  const double z = two_sided_z(gamma);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  Interval ci{std::clamp(center - half, 0.0, 1.0), std::clamp(center + half, 0.0, 1.0)};
  // The algebra gives exact endpoints at the extremes; rounding should not hide them.
  if (k == 0) ci.lower = 0.0;
  if (k == n) ci.upper = 1.0;
  return ci;
}

}  // namespace rehab::stats
