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
#ifndef REHAB_STATS_WILSON_HPP_
#define REHAB_STATS_WILSON_HPP_

#include <cstdint>

namespace rehab::stats {

struct Interval {
  double lower = 0;
  double upper = 0;
  bool contains(double x) const { return lower <= x && x <= upper; }
  double width() const { return upper - lower; }
};

/// Wilson score interval for k successes in n trials, clamped to [0, 1].
/// Throws std::domain_error for n == 0, k > n or gamma outside (0, 1).
Interval wilson_interval(std::int64_t k, std::int64_t n, double gamma = 0.95);

}  // namespace rehab::stats

#endif  // REHAB_STATS_WILSON_HPP_
