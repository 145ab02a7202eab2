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
#ifndef REHAB_SIM_PROFILE_HPP_
#define REHAB_SIM_PROFILE_HPP_

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "rehab/common/vocabulary.hpp"
#include "rehab/runtime/frame.hpp"

namespace rehab::sim {

using runtime::Hand;
using vocab::Band;

struct PatientProfile {
  std::map<std::string, Band> rom_limits;  // joints absent here use the anatomical range
  double movement_speed_scale = 1.0;
  Hand affected_side = Hand::kRight;

  /// Effective range of motion for a canonical joint.
  Band rom(const std::string& joint) const;
  void validate() const;
};

/// Stroke vignette: right elbow braced to 80-120 deg, MRC 3/5 strength
/// mapped to a speed scale of 0.6, right side affected.
PatientProfile standardized_patient();

struct Behavior {
  enum class Kind { kCompleteAt, kNoAttempt, kPartialAttempt };
  Kind kind = Kind::kCompleteAt;
  double offset_s = 0;  // CompleteAt
  double fraction = 0;  // PartialAttempt, in (0, 1)

  static Behavior complete_at(double s) { return {Kind::kCompleteAt, s, 0}; }
  static Behavior no_attempt() { return {Kind::kNoAttempt, 0, 0}; }
  static Behavior partial(double f) { return {Kind::kPartialAttempt, 0, f}; }

  friend bool operator==(const Behavior&, const Behavior&) = default;
};

const char* to_string(Behavior::Kind k);

/// Behavior per monitored step, keyed by step index.
struct BehaviorScript {
  std::map<int, Behavior> steps;
  friend bool operator==(const BehaviorScript&, const BehaviorScript&) = default;
};

struct NoiseModel {
  double fp_rate = 0;
  double fn_rate = 0;
  double dropout_rate = 0;
  std::uint64_t seed = 0;

  void validate() const;
  static NoiseModel none(std::uint64_t seed = 0) { return {0, 0, 0, seed}; }
};

nlohmann::json profile_to_json(const PatientProfile& p);
PatientProfile profile_from_json(const nlohmann::json& j);
nlohmann::json script_to_json(const BehaviorScript& s);
BehaviorScript script_from_json(const nlohmann::json& j);
nlohmann::json noise_to_json(const NoiseModel& n);
NoiseModel noise_from_json(const nlohmann::json& j);

}  // namespace rehab::sim

#endif  // REHAB_SIM_PROFILE_HPP_
