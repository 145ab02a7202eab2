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
#ifndef REHAB_SIM_TRACK_HPP_
#define REHAB_SIM_TRACK_HPP_

#include <vector>

#include "rehab/dsl/ast.hpp"

namespace rehab::sim {

/// Cubic ease-in/ease-out on [0, 1].
double smoothstep(double tau);

/// Inverse of smoothstep on [0, 1].
double smoothstep_inverse(double s);

inline double lerp(double a, double b, double s) { return a + (b - a) * s; }
inline dsl::Vec3 lerp(const dsl::Vec3& a, const dsl::Vec3& b, double s) {
  return {lerp(a.x, b.x, s), lerp(a.y, b.y, s), lerp(a.z, b.z, s)};
}

/// Piecewise motion of one channel over absolute time in seconds. Segments
/// are appended in time order; a zero-length segment is a jump.
template <typename V>
class Track {
 public:
  explicit Track(V initial = V{}) : initial_(initial) {}

  V at(double t) const {
    V v = initial_;
    for (const auto& s : segs_) {
      if (t < s.t0) break;
      if (t >= s.t1) {
        v = s.b;
      } else {
        const double tau = (t - s.t0) / (s.t1 - s.t0);
        v = lerp(s.a, s.b, s.ease ? smoothstep(tau) : tau);
      }
    }
    return v;
  }

  /// Drops every planned motion and freezes the channel at its value at t.
  void freeze(double t) {
    initial_ = at(t);
    segs_.clear();
  }

  void jump(double t, V v) { segs_.push_back({t, t, v, v, false}); }

  /// Moves from the value at t0 to `to`, arriving at t1.
  void move(double t0, double t1, V to, bool ease = true) {
    if (t1 <= t0) {
      jump(t0, to);
      return;
    }
    segs_.push_back({t0, t1, at(t0), to, ease});
  }

  double end_time() const { return segs_.empty() ? 0 : segs_.back().t1; }

 private:
  struct Segment {
    double t0, t1;
    V a, b;
    bool ease;
  };
  V initial_;
  std::vector<Segment> segs_;
};

}  // namespace rehab::sim

#endif  // REHAB_SIM_TRACK_HPP_
