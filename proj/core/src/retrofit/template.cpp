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
#include "rehab/retrofit/template.hpp"

#include <algorithm>
#include <fstream>

#include "rehab/dsl/printer.hpp"

namespace rehab::retrofit {

using genpipe::PrescriptionStep;
using genpipe::Threshold;

const char* to_string(Side s) {
  switch (s) {
    case Side::kLeft: return "left";
    case Side::kRight: return "right";
    case Side::kBilateral: return "bilateral";
  }
  return "?";
}

Side side_from_string(const std::string& s) {
  if (s == "left") return Side::kLeft;
  if (s == "right") return Side::kRight;
  if (s == "bilateral") return Side::kBilateral;
  throw std::invalid_argument("unknown side '" + s + "'");
}

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
}

std::string side_word(Side s) { return s == Side::kBilateral ? "both" : to_string(s); }

std::string other_word(Side s) {
  switch (s) {
    case Side::kLeft: return "right";
    case Side::kRight: return "left";
    case Side::kBilateral: return "both";
  }
  return "";
}

std::vector<std::string> expand_joint(const std::string& j, Side s) {
  if (j.find("{side}") == std::string::npos && j.find("{other}") == std::string::npos) return {j};
  std::vector<std::string> out;
  const std::vector<Side> sides =
      s == Side::kBilateral ? std::vector<Side>{Side::kLeft, Side::kRight} : std::vector<Side>{s};
  for (Side x : sides) {
    std::string v = j;
    replace_all(v, "{side}", to_string(x));
    replace_all(v, "{other}", x == Side::kLeft ? "right" : "left");
    out.push_back(v);
  }
  return out;
}

nlohmann::json step_json(const PrescriptionStep& s) {
  genpipe::Prescription tmp;
  tmp.id = "t";
  tmp.steps = {s};
  return genpipe::prescription_to_json(tmp).at("steps").at(0);
}

PrescriptionStep step_from(const nlohmann::json& j) {
  // Annotations may hold placeholders, so parse without vocabulary checks.
  PrescriptionStep s;
  s.text = j.at("text").get<std::string>();
  if (j.contains("entities")) {
    const auto& e = j.at("entities");
    auto grab = [&](const char* key, std::set<std::string>& out) {
      if (e.contains(key)) {
        for (const auto& x : e.at(key)) out.insert(x.get<std::string>());
      }
    };
    grab("joints", s.entities.joints);
    grab("objects", s.entities.objects);
    grab("targets", s.entities.targets);
    grab("novel", s.entities.novel);
    if (e.contains("thresholds")) {
      for (const auto& t : e.at("thresholds")) {
        s.entities.thresholds.push_back({t.at("quantity").get<double>(), t.at("unit").get<std::string>()});
      }
    }
    s.entities.conditional = e.value("conditional", false);
    s.entities.preparatory = e.value("preparatory", false);
  }
  return s;
}

}  // namespace

void TemplateSchema::validate() const {
  const int n = static_cast<int>(fixed_steps.size());
  if (n == 0) throw std::invalid_argument("template has no fixed steps");
  if (repeat_first < 1 || repeat_last < repeat_first || repeat_last > n) {
    throw std::invalid_argument("template repeat block out of range");
  }
  if (default_repetitions < 1 || max_repetitions < default_repetitions) {
    throw std::invalid_argument("template repetitions out of range");
  }
  if (difficulty_options.empty() || default_difficulty >= difficulty_options.size()) {
    throw std::invalid_argument("template needs at least one difficulty option");
  }
  for (int h : hold_eligible) {
    if (h < 1 || h > n) throw std::invalid_argument("hold-eligible step out of range");
  }
}

TemplateParams default_params(const TemplateSchema& t) {
  return {t.default_side, t.default_repetitions, 0, t.default_difficulty};
}

std::string hold_suffix(double hold_s) {
  return " Hold for " + dsl::format_number(hold_s) + " seconds.";
}

std::vector<InstantiatedStep> instantiate_steps(const TemplateSchema& t, const TemplateParams& p) {
  const auto& diff = t.difficulty_options.at(p.difficulty);
  auto render = [&](int fixed) {
    PrescriptionStep s = t.fixed_steps[fixed - 1];
    const bool uses_difficulty = s.text.find("{difficulty}") != std::string::npos;
    replace_all(s.text, "{side}", side_word(p.side));
    replace_all(s.text, "{other}", other_word(p.side));
    replace_all(s.text, "{difficulty}", diff.label);
    std::set<std::string> joints;
    for (const auto& j : s.entities.joints) {
      for (auto& v : expand_joint(j, p.side)) joints.insert(std::move(v));
    }
    s.entities.joints = std::move(joints);
    if (uses_difficulty) {
      s.entities.thresholds.insert(s.entities.thresholds.end(), diff.thresholds.begin(), diff.thresholds.end());
    }
    if (p.hold_s > 0 && std::count(t.hold_eligible.begin(), t.hold_eligible.end(), fixed)) {
      s.text += hold_suffix(p.hold_s);
      s.entities.thresholds.push_back({p.hold_s, "s"});
    }
    return InstantiatedStep{std::move(s), fixed};
  };
  std::vector<InstantiatedStep> out;
  const int n = static_cast<int>(t.fixed_steps.size());
  for (int i = 1; i < t.repeat_first; ++i) out.push_back(render(i));
  for (int r = 0; r < p.repetitions; ++r) {
    for (int i = t.repeat_first; i <= t.repeat_last; ++i) out.push_back(render(i));
  }
  for (int i = t.repeat_last + 1; i <= n; ++i) out.push_back(render(i));
  return out;
}

genpipe::Prescription instantiate(const TemplateSchema& t, const TemplateParams& p, const std::string& id) {
  genpipe::Prescription rx;
  rx.id = id;
  rx.goal_id = t.goal_id;
  for (auto& s : instantiate_steps(t, p)) rx.steps.push_back(std::move(s.step));
  return rx;
}

nlohmann::json template_to_json(const TemplateSchema& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.fixed_steps) steps.push_back(step_json(s));
  nlohmann::json diffs = nlohmann::json::array();
  for (const auto& d : t.difficulty_options) {
    nlohmann::json th = nlohmann::json::array();
    for (const auto& x : d.thresholds) th.push_back({{"quantity", x.quantity}, {"unit", x.unit}});
    diffs.push_back({{"label", d.label}, {"thresholds", th}});
  }
  return {{"goal_id", t.goal_id},
          {"title", t.title},
          {"equipment", std::vector<std::string>(t.equipment.begin(), t.equipment.end())},
          {"fixed_steps", steps},
          {"repeat", {{"first", t.repeat_first}, {"last", t.repeat_last},
                      {"default", t.default_repetitions}, {"max", t.max_repetitions}}},
          {"hold_eligible", t.hold_eligible},
          {"difficulty", {{"options", diffs}, {"default", t.default_difficulty}}},
          {"default_side", to_string(t.default_side)}};
}

TemplateSchema template_from_json(const nlohmann::json& j) {
  TemplateSchema t;
  t.goal_id = j.at("goal_id").get<int>();
  t.title = j.value("title", std::string());
  for (const auto& e : j.at("equipment")) t.equipment.insert(e.get<std::string>());
  for (const auto& s : j.at("fixed_steps")) t.fixed_steps.push_back(step_from(s));
  const auto& r = j.at("repeat");
  t.repeat_first = r.at("first").get<int>();
  t.repeat_last = r.at("last").get<int>();
  t.default_repetitions = r.value("default", 1);
  t.max_repetitions = r.value("max", 10);
  if (j.contains("hold_eligible")) t.hold_eligible = j.at("hold_eligible").get<std::vector<int>>();
  const auto& d = j.at("difficulty");
  for (const auto& o : d.at("options")) {
    DifficultyOption opt;
    opt.label = o.at("label").get<std::string>();
    if (o.contains("thresholds")) {
      for (const auto& x : o.at("thresholds")) {
        opt.thresholds.push_back({x.at("quantity").get<double>(), x.at("unit").get<std::string>()});
      }
    }
    t.difficulty_options.push_back(std::move(opt));
  }
  t.default_difficulty = d.value("default", std::size_t{0});
  t.default_side = side_from_string(j.value("default_side", std::string("right")));
  t.validate();
  return t;
}

TemplateSchema load_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template '" + path + "'");
  return template_from_json(nlohmann::json::parse(in));
}

}  // namespace rehab::retrofit
