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
#include "rehab/sim/scenario.hpp"

#include <fstream>
#include <stdexcept>

namespace rehab::sim {

nlohmann::json scenario_to_json(const Scenario& s) {
  return {{"profile", profile_to_json(s.profile)},
          {"script", script_to_json(s.script)},
          {"noise", noise_to_json(s.noise)},
          {"seed", s.seed},
          {"hz", s.hz}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.profile = j.contains("profile") ? profile_from_json(j.at("profile")) : standardized_patient();
  s.script = script_from_json(j.at("script"));
  s.noise = j.contains("noise") ? noise_from_json(j.at("noise")) : NoiseModel::none();
  s.seed = j.value("seed", s.noise.seed);
  s.noise.seed = s.seed;
  s.hz = j.value("hz", 10.0);
  if (!(s.hz >= 1 && s.hz <= 60)) throw std::invalid_argument("scenario hz must lie in [1, 60]");
  s.profile.validate();
  s.noise.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario '" + path + "'");
  return scenario_from_json(nlohmann::json::parse(in));
}

}  // namespace rehab::sim
