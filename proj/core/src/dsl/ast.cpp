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
#include "rehab/dsl/ast.hpp"

#include <algorithm>

namespace rehab::dsl {

const char* to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kTarget: return "target";
    case SceneKind::kObject: return "object";
    case SceneKind::kJoint: return "joint";
  }
  return "?";
}

const char* atom_keyword(const Atom& atom) {
  struct Visitor {
    const char* operator()(const JointAngle&) const { return "joint_angle"; }
    const char* operator()(const HandAt&) const { return "hand_at"; }
    const char* operator()(const Grasp&) const { return "grasp"; }
    const char* operator()(const Release&) const { return "release"; }
    const char* operator()(const ObjectAt&) const { return "object_at"; }
    const char* operator()(const Rest&) const { return "rest"; }
  };
  return std::visit(Visitor{}, atom);
}

bool operator==(const Predicate& a, const Predicate& b) { return a.node == b.node; }
bool operator==(const AllOf& a, const AllOf& b) { return a.terms == b.terms; }
bool operator==(const AnyOf& a, const AnyOf& b) { return a.terms == b.terms; }

namespace {

int max_term_depth(const std::vector<Predicate>& terms) {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, depth(t));
  return d;
}

void collect(const Predicate& p, std::vector<const Atom*>& out) {
  if (const auto* a = std::get_if<Atom>(&p.node)) {
    out.push_back(a);
  } else if (const auto* all = std::get_if<AllOf>(&p.node)) {
    for (const auto& t : all->terms) collect(t, out);
  } else if (const auto* any = std::get_if<AnyOf>(&p.node)) {
    for (const auto& t : any->terms) collect(t, out);
  } else if (const auto* h = std::get_if<HoldFor>(&p.node)) {
    out.push_back(&h->atom);
  } else if (const auto* c = std::get_if<CountOf>(&p.node)) {
    out.push_back(&c->atom);
  }
}

}  // namespace

int depth(const Predicate& p) {
  if (std::holds_alternative<Atom>(p.node)) return 1;
  if (const auto* all = std::get_if<AllOf>(&p.node)) return 1 + max_term_depth(all->terms);
  if (const auto* any = std::get_if<AnyOf>(&p.node)) return 1 + max_term_depth(any->terms);
  return 2;
}

std::vector<const Atom*> atoms_of(const Predicate& p) {
  std::vector<const Atom*> out;
  collect(p, out);
  return out;
}

const SceneDecl* InterventionProgram::find_decl(std::string_view id) const {
  auto it = std::find_if(scene.begin(), scene.end(), [&](const SceneDecl& d) { return d.id == id; });
  return it == scene.end() ? nullptr : &*it;
}

int InterventionProgram::monitored_step_count() const {
  return static_cast<int>(std::count_if(steps.begin(), steps.end(),
                                        [](const Step& s) { return s.monitored(); }));
}

}  // namespace rehab::dsl
