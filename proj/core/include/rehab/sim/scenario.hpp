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
#ifndef REHAB_SIM_SCENARIO_HPP_
#define REHAB_SIM_SCENARIO_HPP_

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "rehab/sim/profile.hpp"

namespace rehab::sim {

/// Everything a simulated session needs besides the program.
struct Scenario {
  PatientProfile profile;
  BehaviorScript script;
  NoiseModel noise;
  std::uint64_t seed = 0;  // copied into noise.seed when loading
  double hz = 10;
};

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

}  // namespace rehab::sim

#endif  // REHAB_SIM_SCENARIO_HPP_
