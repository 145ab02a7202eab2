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
#include "rehab/sim/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace rehab::sim {

using nlohmann::json;

Band PatientProfile::rom(const std::string& joint) const {
  if (auto it = rom_limits.find(joint); it != rom_limits.end()) return it->second;
  if (const auto* spec = vocab::find_joint(joint)) return spec->anatomical;
  throw std::invalid_argument("unknown joint '" + joint + "'");
}

void PatientProfile::validate() const {
  for (const auto& [joint, band] : rom_limits) {
    if (!vocab::is_canonical_joint(joint)) {
      throw std::invalid_argument("profile: unknown joint '" + joint + "'");
    }
    if (!(band.min_deg < band.max_deg)) {
      throw std::invalid_argument("profile: ROM for '" + joint + "' must satisfy min < max");
    }
  }
  if (!(movement_speed_scale > 0 && movement_speed_scale <= 1)) {
    throw std::invalid_argument("profile: movement_speed_scale must lie in (0, 1]");
  }
  if (affected_side == Hand::kNone) throw std::invalid_argument("profile: affected side required");
}

PatientProfile standardized_patient() {
  PatientProfile p;
  p.rom_limits["right_elbow_flexion"] = Band{80, 120};
  p.movement_speed_scale = 0.6;
  p.affected_side = Hand::kRight;
  return p;
}

const char* to_string(Behavior::Kind k) {
  switch (k) {
    case Behavior::Kind::kCompleteAt: return "complete_at";
    case Behavior::Kind::kNoAttempt: return "no_attempt";
    case Behavior::Kind::kPartialAttempt: return "partial";
  }
  return "?";
}

void NoiseModel::validate() const {
  for (double r : {fp_rate, fn_rate, dropout_rate}) {
    if (!(r >= 0 && r < 1)) throw std::invalid_argument("noise rates must lie in [0, 1)");
  }
}

json profile_to_json(const PatientProfile& p) {
  json rom = json::object();
  for (const auto& [joint, band] : p.rom_limits) rom[joint] = {band.min_deg, band.max_deg};
  return {{"rom_limits", rom},
          {"movement_speed_scale", p.movement_speed_scale},
          {"affected_side", runtime::to_string(p.affected_side)}};
}

PatientProfile profile_from_json(const json& j) {
  PatientProfile p;
  for (const auto& [joint, band] : j.at("rom_limits").items()) {
    p.rom_limits[joint] = Band{band.at(0).get<double>(), band.at(1).get<double>()};
  }
  p.movement_speed_scale = j.at("movement_speed_scale").get<double>();
  p.affected_side = runtime::hand_from_string(j.at("affected_side").get<std::string>());
  p.validate();
  return p;
}

json script_to_json(const BehaviorScript& s) {
  json steps = json::array();
  for (const auto& [index, b] : s.steps) {
    json e = {{"step", index}, {"behavior", to_string(b.kind)}};
    if (b.kind == Behavior::Kind::kCompleteAt) e["offset_s"] = b.offset_s;
    if (b.kind == Behavior::Kind::kPartialAttempt) e["fraction"] = b.fraction;
    steps.push_back(std::move(e));
  }
  return steps;
}

BehaviorScript script_from_json(const json& j) {
  BehaviorScript s;
  for (const auto& e : j) {
    const int index = e.at("step").get<int>();
    const std::string kind = e.at("behavior").get<std::string>();
    Behavior b;
    if (kind == "complete_at") {
      b = Behavior::complete_at(e.at("offset_s").get<double>());
      if (!(b.offset_s >= 0)) throw std::invalid_argument("offset_s must be >= 0");
    } else if (kind == "no_attempt") {
      b = Behavior::no_attempt();
    } else if (kind == "partial") {
      b = Behavior::partial(e.at("fraction").get<double>());
      if (!(b.fraction > 0 && b.fraction < 1)) throw std::invalid_argument("fraction must lie in (0, 1)");
    } else {
      throw std::invalid_argument("unknown behavior '" + kind + "'");
    }
    s.steps[index] = b;
  }
  return s;
}

json noise_to_json(const NoiseModel& n) {
  return {{"fp_rate", n.fp_rate}, {"fn_rate", n.fn_rate}, {"dropout_rate", n.dropout_rate},
          {"seed", n.seed}};
}

NoiseModel noise_from_json(const json& j) {
  NoiseModel n;
  n.fp_rate = j.value("fp_rate", 0.0);
  n.fn_rate = j.value("fn_rate", 0.0);
  n.dropout_rate = j.value("dropout_rate", 0.0);
  n.seed = j.value("seed", std::uint64_t{0});
  n.validate();
  return n;
}

}  // namespace rehab::sim
