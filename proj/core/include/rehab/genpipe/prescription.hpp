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
#ifndef REHAB_GENPIPE_PRESCRIPTION_HPP_
#define REHAB_GENPIPE_PRESCRIPTION_HPP_

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rehab::genpipe {

/// Units: "deg", "cm", "in", "s", "reps".
struct Threshold {
  double quantity = 0;
  std::string unit;
  friend bool operator==(const Threshold&, const Threshold&) = default;
  friend auto operator<=>(const Threshold&, const Threshold&) = default;
};

struct EntityAnnotation {
  std::set<std::string> joints;
  std::set<std::string> objects;
  std::set<std::string> targets;
  std::vector<Threshold> thresholds;
  bool conditional = false;   // "if ..." clause
  bool preparatory = false;   // practice of a component action before the task
  std::set<std::string> novel;  // entities outside the canonical vocabularies

  std::vector<double> thresholds_in(const std::string& unit) const;
  friend bool operator==(const EntityAnnotation&, const EntityAnnotation&) = default;
};

struct PrescriptionStep {
  std::string text;
  EntityAnnotation entities;
  friend bool operator==(const PrescriptionStep&, const PrescriptionStep&) = default;
};

struct Prescription {
  std::string id;
  std::optional<int> goal_id;  // nullopt for a custom prescription
  std::vector<PrescriptionStep> steps;
  std::string author;

  friend bool operator==(const Prescription&, const Prescription&) = default;
};

/// Union of every step's annotations.
struct Vocabulary {
  std::set<std::string> joints;
  std::set<std::string> objects;
  std::set<std::string> targets;
  std::vector<Threshold> thresholds;
};

Vocabulary global_vocabulary(const Prescription& rx);

class PrescriptionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws PrescriptionError when the prescription has no steps, an empty
/// step, an unknown unit, or an entity that is neither canonical nor novel.
void validate_prescription(const Prescription& rx);

nlohmann::json prescription_to_json(const Prescription& rx);
Prescription prescription_from_json(const nlohmann::json& j);
Prescription load_prescription(const std::string& path);

}  // namespace rehab::genpipe

#endif  // REHAB_GENPIPE_PRESCRIPTION_HPP_
