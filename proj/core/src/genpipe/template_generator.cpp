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
#include "rehab/genpipe/template_generator.hpp"

#include <algorithm>
#include <cmath>

#include "rehab/common/text.hpp"
#include "rehab/common/vocabulary.hpp"
#include "rehab/dsl/printer.hpp"

namespace rehab::genpipe {

using namespace rehab::dsl;
using vocab::Band;

namespace {

bool first_word_in(const std::string& s, std::initializer_list<const char*> set) {
  const auto ws = text::words(s);
  if (ws.empty()) return false;
  return std::any_of(set.begin(), set.end(), [&](const char* w) { return ws.front() == w; });
}

bool mentions_placing(const std::string& s) {
  for (const char* w : {"place", "put", "set", "release", "drop", "stack"}) {
    if (text::contains_word(s, w)) return true;
  }
  return false;
}

Band joint_band(const std::string& joint, const std::vector<double>& degs) {
  if (degs.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(degs.begin(), degs.end());
    return {*lo, *hi};
  }
  if (degs.size() == 1) {
    return {std::max(0.0, degs[0] - kSingleThresholdToleranceDeg),
            std::min(359.0, degs[0] + kSingleThresholdToleranceDeg)};
  }
  const auto* spec = vocab::find_joint(joint);
  return spec ? spec->default_band : Band{0, 90};
}

Predicate combine(std::vector<Predicate> terms) {
  if (terms.size() == 1) return std::move(terms.front());
  return AllOf{std::move(terms)};
}

}  // namespace

std::optional<Expectation> expectation_for(const PrescriptionStep& step) {
  const auto& e = step.entities;
  if (e.conditional) return std::nullopt;
  if (first_word_in(step.text, {"sit", "prepare", "rest", "relax"})) return std::nullopt;

  std::vector<Atom> atoms;
  const auto degs = e.thresholds_in("deg");
  for (const auto& j : e.joints) {
    const Band b = joint_band(j, degs);
    atoms.push_back(JointAngle{j, b.min_deg, b.max_deg});
  }
  if (!e.objects.empty() && !e.targets.empty()) {
    for (const auto& o : e.objects) {
      atoms.push_back(ObjectAt{o, *e.targets.begin(), vocab::kDefaultObjectRadiusCm});
    }
  } else if (!e.objects.empty()) {
    const bool place = mentions_placing(step.text);
    for (const auto& o : e.objects) {
      if (place) atoms.push_back(Release{o});
      else atoms.push_back(Grasp{o});
    }
  } else if (!e.targets.empty()) {
    atoms.push_back(HandAt{*e.targets.begin(), vocab::kDefaultHandRadiusCm});
  }
  if (atoms.empty()) return std::nullopt;

  Expectation x;
  x.timeout_s = vocab::kDefaultStepTimeoutSeconds;
  std::vector<Predicate> terms;
  const auto secs = e.thresholds_in("s");
  const auto reps = e.thresholds_in("reps");
  if (text::contains_word(step.text, "hold") && !secs.empty()) {
    terms.push_back(HoldFor{atoms.front(), secs.front()});
    x.timeout_s = std::max(x.timeout_s, secs.front() + 10);
  } else if (!reps.empty() && reps.front() >= 1) {
    const int n = static_cast<int>(std::lround(reps.front()));
    terms.push_back(CountOf{atoms.front(), n});
    x.timeout_s = std::max(x.timeout_s, 3.0 * n + 10);
  } else {
    terms.push_back(atoms.front());
  }
  for (std::size_t i = 1; i < atoms.size(); ++i) terms.push_back(atoms[i]);
  x.predicate = combine(std::move(terms));
  return x;
}

std::vector<SceneDecl> layout_scene(const Prescription& rx) {
  std::vector<std::string> targets;
  std::vector<std::string> objects;
  std::vector<std::string> joints;
  auto note = [](std::vector<std::string>& v, const std::string& id) {
    if (std::find(v.begin(), v.end(), id) == v.end()) v.push_back(id);
  };
  for (const auto& s : rx.steps) {
    auto x = expectation_for(s);
    if (!x) continue;
    for (const Atom* a : atoms_of(x->predicate)) {
      std::visit(
          [&](const auto& atom) {
            using T = std::decay_t<decltype(atom)>;
            if constexpr (std::is_same_v<T, JointAngle> || std::is_same_v<T, Rest>) note(joints, atom.joint);
            if constexpr (std::is_same_v<T, HandAt>) note(targets, atom.target);
            if constexpr (std::is_same_v<T, Grasp> || std::is_same_v<T, Release>) note(objects, atom.object);
            if constexpr (std::is_same_v<T, ObjectAt>) {
              note(objects, atom.object);
              note(targets, atom.target);
            }
          },
          *a);
    }
  }
  std::vector<SceneDecl> scene;
  auto row = [&](const std::vector<std::string>& ids, SceneKind kind, double y, double spacing) {
    const double mid = 0.5 * (static_cast<double>(ids.size()) - 1);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      SceneDecl d;
      d.kind = kind;
      d.id = ids[i];
      d.position = Vec3{spacing * (static_cast<double>(i) - mid), y, 0};
      scene.push_back(std::move(d));
    }
  };
  row(targets, SceneKind::kTarget, 30, 25);
  row(objects, SceneKind::kObject, 50, 15);
  for (const auto& j : joints) {
    SceneDecl d;
    d.kind = SceneKind::kJoint;
    d.id = j;
    scene.push_back(std::move(d));
  }
  return scene;
}

InterventionProgram translate_prescription(const Prescription& rx) {
  InterventionProgram p;
  p.name = rx.id;
  p.scene = layout_scene(rx);
  int index = 0;
  for (const auto& s : rx.steps) {
    Step st;
    st.index = ++index;
    st.utterance = s.text;
    st.expect = expectation_for(s);
    p.steps.push_back(std::move(st));
  }
  return p;
}

std::string generate_template_program(const Prescription& rx) {
  return print_program(translate_prescription(rx));
}

}  // namespace rehab::genpipe
