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
#ifndef REHAB_COMMON_TIME_HPP_
#define REHAB_COMMON_TIME_HPP_

#include <chrono>
#include <cmath>
#include <functional>

namespace rehab {

// All session timing runs on integer microseconds so that poll instants,
// frame ticks and timeouts line up exactly.
using Micros = std::chrono::microseconds;

inline Micros from_seconds(double s) {
  return Micros(static_cast<Micros::rep>(std::llround(s * 1e6)));
}

inline double to_seconds(Micros t) { return static_cast<double>(t.count()) / 1e6; }

/// Monotone virtual clock. The optional pacer is invoked on every advance
/// and may block (the service uses it to play sessions at a real-time factor).
class VirtualClock {
 public:
  using Pacer = std::function<void(Micros from, Micros to)>;

  VirtualClock() = default;
  explicit VirtualClock(Pacer pacer) : pacer_(std::move(pacer)) {}

  Micros now() const { return now_; }

  void advance_to(Micros t) {
    if (t <= now_) return;
    if (pacer_) pacer_(now_, t);
    now_ = t;
  }

 private:
  Micros now_{0};
  Pacer pacer_;
};

}  // namespace rehab

#endif  // REHAB_COMMON_TIME_HPP_
