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
#ifndef REHAB_COMMON_VOCABULARY_HPP_
#define REHAB_COMMON_VOCABULARY_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rehab::vocab {

struct Band {
  double min_deg = 0;
  double max_deg = 0;
  friend bool operator==(const Band&, const Band&) = default;
};

/// Sensor-channel description of one canonical joint.
struct JointSpec {
  std::string name;
  double rest_deg;
  Band anatomical;    // physically reachable range for an unimpaired joint
  Band default_band;  // band the API library uses when none is prescribed
};

std::span<const JointSpec> canonical_joints();
const JointSpec* find_joint(std::string_view name);
bool is_canonical_joint(std::string_view name);

/// Objects and targets that appear in the shipped worksheets. Anything else
/// in a prescription must be marked novel.
std::span<const std::string> canonical_scene_entities();
bool is_canonical_scene_entity(std::string_view id);

// API-library defaults. Numeric atom parameters equal to one of these are
// considered default-derived by the hallucination check.
inline constexpr double kDefaultHandRadiusCm = 5.0;
inline constexpr double kDefaultObjectRadiusCm = 8.0;
inline constexpr double kDefaultRestSeconds = 2.0;
inline constexpr double kDefaultStepTimeoutSeconds = 20.0;

inline constexpr double kCentimetersPerInch = 2.54;

}  // namespace rehab::vocab

#endif  // REHAB_COMMON_VOCABULARY_HPP_
