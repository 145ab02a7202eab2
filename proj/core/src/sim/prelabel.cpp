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
#include "rehab/sim/prelabel.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rehab/common/rng.hpp"

namespace rehab::sim {

std::int64_t PrelabelMix::incomplete() const {
  std::int64_t k = 0;
  for (const auto& b : behaviors) k += b.kind != Behavior::Kind::kCompleteAt;
  return k;
}

PrelabelMix make_prelabel_mix(int n, double incomplete_fraction, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("prelabel mix needs at least one step");
  if (!(incomplete_fraction >= 0 && incomplete_fraction <= 1)) {
    throw std::invalid_argument("incomplete fraction must lie in [0, 1]");
  }
  Rng rng(seed);
  const int k = static_cast<int>(std::lround(n * incomplete_fraction));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(order[i], order[j]);
  }
  const int no_attempt = k - k / 2;

  PrelabelMix mix;
  mix.behaviors.assign(n, Behavior{});
  std::vector<bool> assigned(n, false);
  for (int i = 0; i < k; ++i) {
    const int slot = order[i];
    assigned[slot] = true;
    mix.behaviors[slot] = i < no_attempt
                              ? Behavior::no_attempt()
                              : Behavior::partial(rng.uniform(kMinPartialFraction, kMaxPartialFraction));
  }
  for (int slot = 0; slot < n; ++slot) {
    if (!assigned[slot]) {
      mix.behaviors[slot] = Behavior::complete_at(rng.uniform(kMinCompleteOffsetS, kMaxCompleteOffsetS));
    }
  }
  for (int slot = 0; slot < n; ++slot) {
    const Behavior& b = mix.behaviors[slot];
    mix.script.steps[slot + 1] = b;
    stats::PreLabel l;
    l.step_index = slot + 1;
    l.expected = b.kind == Behavior::Kind::kCompleteAt ? stats::Expected::kShouldComplete
                                                       : stats::Expected::kShouldNotComplete;
    mix.labels.push_back(l);
  }
  return mix;
}

}  // namespace rehab::sim
