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
#ifndef REHAB_RUNTIME_PREDICATE_HPP_
#define REHAB_RUNTIME_PREDICATE_HPP_

#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "rehab/dsl/ast.hpp"
#include "rehab/runtime/frame.hpp"

namespace rehab::runtime {

class ChannelMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Angular travel below which a joint counts as resting.
inline constexpr double kRestTravelDeg = 2.0;

/// Poll instants start + round(k * 1e6 / hz) microseconds, k >= 1.
struct PollSchedule {
  Micros start{0};
  double hz = 10;

  Micros instant(long k) const {
    return start + Micros(static_cast<Micros::rep>(std::llround(static_cast<double>(k) * 1e6 / hz)));
  }
};

struct EvalContext {
  std::map<std::string, Vec3> targets;  // static target positions from the scene
  PollSchedule polls;
};

/// Builds an EvalContext from the program's scene declarations.
EvalContext make_context(const dsl::InterventionProgram& p, Micros start, double poll_hz);

/// Evaluates `pred` at `now` over `window` (time-ordered frames since the
/// announcement; frames after `now` are ignored).
bool eval_predicate(const dsl::Predicate& pred, std::span<const PoseFrame> window, Micros now,
                    const EvalContext& ctx);

bool eval_atom(const dsl::Atom& atom, std::span<const PoseFrame> window, Micros now,
               const EvalContext& ctx);

/// Number of rising edges of the atom's per-frame level signal in the window.
int count_rising_edges(const dsl::Atom& atom, std::span<const PoseFrame> window, Micros now,
                       const EvalContext& ctx);

}  // namespace rehab::runtime

#endif  // REHAB_RUNTIME_PREDICATE_HPP_
