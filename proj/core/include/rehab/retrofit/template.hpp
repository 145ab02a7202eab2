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
#ifndef REHAB_RETROFIT_TEMPLATE_HPP_
#define REHAB_RETROFIT_TEMPLATE_HPP_

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/genpipe/prescription.hpp"

namespace rehab::retrofit {

enum class Side { kLeft, kRight, kBilateral };

const char* to_string(Side s);
Side side_from_string(const std::string& s);

struct DifficultyOption {
  std::string label;  // substituted for "{difficulty}"
  std::vector<genpipe::Threshold> thresholds;
};

/// Worksheet-based template with bounded parameter slots. Step texts and
/// joint annotations may use "{side}", "{other}" and "{difficulty}".
struct TemplateSchema {
  int goal_id = 0;
  std::string title;
  std::vector<genpipe::PrescriptionStep> fixed_steps;
  std::set<std::string> equipment;

  // Steps [repeat_first, repeat_last] (1-based, inclusive) form the block
  // that the repetition parameter expands.
  int repeat_first = 1;
  int repeat_last = 1;
  int default_repetitions = 1;
  int max_repetitions = 10;

  std::vector<int> hold_eligible;  // 1-based fixed step numbers
  std::vector<DifficultyOption> difficulty_options;
  std::size_t default_difficulty = 0;
  Side default_side = Side::kRight;

  void validate() const;
};

struct TemplateParams {
  Side side = Side::kRight;
  int repetitions = 1;
  double hold_s = 0;
  std::size_t difficulty = 0;
  friend bool operator==(const TemplateParams&, const TemplateParams&) = default;
};

TemplateParams default_params(const TemplateSchema& t);

/// One instantiated step, remembering the fixed step it came from.
struct InstantiatedStep {
  genpipe::PrescriptionStep step;
  int fixed_index = 0;  // 1-based
};

std::vector<InstantiatedStep> instantiate_steps(const TemplateSchema& t, const TemplateParams& p);

/// The prescription a template-based DHI would deliver for `p`.
genpipe::Prescription instantiate(const TemplateSchema& t, const TemplateParams& p, const std::string& id);

/// Suffix appended to hold-eligible steps when hold_s > 0.
std::string hold_suffix(double hold_s);

nlohmann::json template_to_json(const TemplateSchema& t);
TemplateSchema template_from_json(const nlohmann::json& j);
TemplateSchema load_template(const std::string& path);

}  // namespace rehab::retrofit

#endif  // REHAB_RETROFIT_TEMPLATE_HPP_
