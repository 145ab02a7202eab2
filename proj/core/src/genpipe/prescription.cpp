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
#include "rehab/genpipe/prescription.hpp"

#include <algorithm>
#include <fstream>

#include "rehab/common/text.hpp"
#include "rehab/common/vocabulary.hpp"

namespace rehab::genpipe {

namespace {

const std::set<std::string>& units() {
  static const std::set<std::string> kUnits = {"deg", "cm", "in", "s", "reps"};
  return kUnits;
}

nlohmann::json set_json(const std::set<std::string>& s) {
  return nlohmann::json(std::vector<std::string>(s.begin(), s.end()));
}

std::set<std::string> set_from(const nlohmann::json& j, const char* key) {
  std::set<std::string> out;
  if (j.contains(key)) {
    for (const auto& e : j.at(key)) out.insert(e.get<std::string>());
  }
  return out;
}

}  // namespace

std::vector<double> EntityAnnotation::thresholds_in(const std::string& unit) const {
  std::vector<double> out;
  for (const auto& t : thresholds) {
    if (t.unit == unit) out.push_back(t.quantity);
  }
  return out;
}

Vocabulary global_vocabulary(const Prescription& rx) {
  Vocabulary v;
  for (const auto& s : rx.steps) {
    v.joints.insert(s.entities.joints.begin(), s.entities.joints.end());
    v.objects.insert(s.entities.objects.begin(), s.entities.objects.end());
    v.targets.insert(s.entities.targets.begin(), s.entities.targets.end());
    v.thresholds.insert(v.thresholds.end(), s.entities.thresholds.begin(), s.entities.thresholds.end());
  }
  return v;
}

void validate_prescription(const Prescription& rx) {
  if (rx.steps.empty()) throw PrescriptionError("prescription '" + rx.id + "' has no steps");
  if (rx.goal_id && (*rx.goal_id < 1 || *rx.goal_id > 10)) {
    throw PrescriptionError("goal_id must be 1..10 or custom");
  }
  for (std::size_t i = 0; i < rx.steps.size(); ++i) {
    const auto& s = rx.steps[i];
    const std::string where = "step " + std::to_string(i + 1);
    if (text::trim(s.text).empty()) throw PrescriptionError(where + " has empty text");
    const auto& e = s.entities;
    for (const auto& j : e.joints) {
      if (!vocab::is_canonical_joint(j) && !e.novel.count(j)) {
        throw PrescriptionError(where + ": joint '" + j + "' is not canonical and not marked novel");
      }
    }
    for (const auto* group : {&e.objects, &e.targets}) {
      for (const auto& id : *group) {
        if (!vocab::is_canonical_scene_entity(id) && !e.novel.count(id)) {
          throw PrescriptionError(where + ": entity '" + id + "' is not canonical and not marked novel");
        }
      }
    }
    for (const auto& t : e.thresholds) {
      if (!units().count(t.unit)) throw PrescriptionError(where + ": unknown unit '" + t.unit + "'");
    }
  }
}

nlohmann::json prescription_to_json(const Prescription& rx) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : rx.steps) {
    nlohmann::json th = nlohmann::json::array();
    for (const auto& t : s.entities.thresholds) th.push_back({{"quantity", t.quantity}, {"unit", t.unit}});
    nlohmann::json ent = {{"joints", set_json(s.entities.joints)},
                          {"objects", set_json(s.entities.objects)},
                          {"targets", set_json(s.entities.targets)},
                          {"thresholds", th},
                          {"conditional", s.entities.conditional}};
    if (s.entities.preparatory) ent["preparatory"] = true;
    if (!s.entities.novel.empty()) ent["novel"] = set_json(s.entities.novel);
    steps.push_back({{"text", s.text}, {"entities", ent}});
  }
  nlohmann::json j = {{"id", rx.id}, {"steps", steps}};
  j["goal_id"] = rx.goal_id ? nlohmann::json(*rx.goal_id) : nlohmann::json("custom");
  if (!rx.author.empty()) j["author"] = rx.author;
  return j;
}

Prescription prescription_from_json(const nlohmann::json& j) {
  Prescription rx;
  try {
    rx.id = j.at("id").get<std::string>();
    const auto& g = j.at("goal_id");
    if (g.is_number_integer()) rx.goal_id = g.get<int>();
    else if (!(g.is_string() && g.get<std::string>() == "custom")) {
      throw PrescriptionError("goal_id must be an integer or \"custom\"");
    }
    rx.author = j.value("author", std::string());
    for (const auto& s : j.at("steps")) {
      PrescriptionStep st;
      st.text = s.at("text").get<std::string>();
      if (s.contains("entities")) {
        const auto& e = s.at("entities");
        st.entities.joints = set_from(e, "joints");
        st.entities.objects = set_from(e, "objects");
        st.entities.targets = set_from(e, "targets");
        st.entities.novel = set_from(e, "novel");
        if (e.contains("thresholds")) {
          for (const auto& t : e.at("thresholds")) {
            st.entities.thresholds.push_back({t.at("quantity").get<double>(), t.at("unit").get<std::string>()});
          }
        }
        st.entities.conditional = e.value("conditional", false);
        st.entities.preparatory = e.value("preparatory", false);
      }
      rx.steps.push_back(std::move(st));
    }
  } catch (const nlohmann::json::exception& e) {
    throw PrescriptionError(std::string("malformed prescription: ") + e.what());
  }
  validate_prescription(rx);
  return rx;
}

Prescription load_prescription(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PrescriptionError("cannot open prescription '" + path + "'");
  try {
    return prescription_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw PrescriptionError(path + ": " + e.what());
  }
}

}  // namespace rehab::genpipe
