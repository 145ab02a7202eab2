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
#include "rehab/common/vocabulary.hpp"

#include <algorithm>
#include <array>

namespace rehab::vocab {

namespace {

std::vector<JointSpec> build_joints() {
  struct Base {
    const char* suffix;
    double rest;
    Band anatomical;
    Band band;
  };
  // Angles in degrees. forearm_rotation: 0 = palm down, 180 = palm up.
  // wrist_flexion: 90 = neutral. thumb_opposition: 0 = thumb abducted.
  static constexpr std::array<Base, 7> kBases{{
      {"shoulder_abduction", 15, {0, 180}, {60, 120}},
      {"shoulder_flexion", 15, {0, 180}, {60, 120}},
      {"elbow_flexion", 90, {0, 150}, {100, 140}},
      {"forearm_rotation", 20, {0, 180}, {150, 180}},
      {"wrist_flexion", 90, {20, 160}, {110, 150}},
      {"finger_spread", 8, {0, 50}, {25, 45}},
      {"thumb_opposition", 10, {0, 130}, {80, 120}},
  }};
  std::vector<JointSpec> out;
  for (const char* side : {"right_", "left_"}) {
    for (const auto& b : kBases) {
      out.push_back({std::string(side) + b.suffix, b.rest, b.anatomical, b.band});
    }
  }
  return out;
}

const std::vector<JointSpec>& joints() {
  static const std::vector<JointSpec> kJoints = build_joints();
  return kJoints;
}

const std::vector<std::string>& entities() {
  static const std::vector<std::string> kEntities = {
      "pink_postit", "blue_postit", "yellow_postit", "scoop",       "apple",
      "lemon",       "banana",      "bowl",          "spoon",       "chopsticks",
      "fork",        "container",   "wallet",        "coin",        "coin_pocket",
      "orange_cube", "blue_cube",   "green_cube",    "tongs",       "yellow_bead",
      "red_bead",    "blue_bead",   "towel",
  };
  return kEntities;
}

}  // namespace

std::span<const JointSpec> canonical_joints() { return joints(); }

const JointSpec* find_joint(std::string_view name) {
  const auto& js = joints();
  auto it = std::find_if(js.begin(), js.end(), [&](const JointSpec& j) { return j.name == name; });
  return it == js.end() ? nullptr : &*it;
}

bool is_canonical_joint(std::string_view name) { return find_joint(name) != nullptr; }

std::span<const std::string> canonical_scene_entities() { return entities(); }

bool is_canonical_scene_entity(std::string_view id) {
  const auto& es = entities();
  return std::find(es.begin(), es.end(), id) != es.end();
}

}  // namespace rehab::vocab
