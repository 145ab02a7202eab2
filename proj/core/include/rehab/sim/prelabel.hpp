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
#ifndef REHAB_SIM_PRELABEL_HPP_
#define REHAB_SIM_PRELABEL_HPP_

#include <cstdint>
#include <vector>

#include "rehab/sim/profile.hpp"
#include "rehab/stats/confusion.hpp"

namespace rehab::sim {

/// Pre-labeled behavior mix over `n` monitored slots. Slot i has behavior
/// `behaviors[i]`, also stored in `script` under step index i + 1.
struct PrelabelMix {
  std::vector<Behavior> behaviors;
  BehaviorScript script;
  std::vector<stats::PreLabel> labels;

  std::int64_t incomplete() const;
};

inline constexpr double kMinCompleteOffsetS = 2.0;
inline constexpr double kMaxCompleteOffsetS = 8.0;
inline constexpr double kMinPartialFraction = 0.3;
inline constexpr double kMaxPartialFraction = 0.9;

/// Exactly round(n * fraction) slots are incomplete, split evenly between
/// NoAttempt and PartialAttempt (NoAttempt takes the odd one); the others
/// complete at an offset drawn uniformly from [2, 8] s.
PrelabelMix make_prelabel_mix(int n, double incomplete_fraction, std::uint64_t seed);

}  // namespace rehab::sim

#endif  // REHAB_SIM_PRELABEL_HPP_
