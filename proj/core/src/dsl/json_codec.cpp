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
#include "rehab/dsl/json_codec.hpp"

#include <string>

namespace rehab::dsl {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw JsonCodecError("expected object");
  auto it = j.find(key);
  if (it == j.end()) throw JsonCodecError(std::string("missing field '") + key + "'");
  return *it;
}

double num(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw JsonCodecError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw JsonCodecError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

int integer(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) {
    throw JsonCodecError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

json expectation_to_json(const Expectation& e) {
  return {{"within_s", e.timeout_s}, {"pred", predicate_to_json(e.predicate)}};
}

Expectation expectation_from_json(const json& j) {
  Expectation e;
  e.timeout_s = num(j, "within_s");
  e.predicate = predicate_from_json(field(j, "pred"));
  return e;
}

SceneKind kind_from_string(const std::string& s) {
  if (s == "target") return SceneKind::kTarget;
  if (s == "object") return SceneKind::kObject;
  if (s == "joint") return SceneKind::kJoint;
  throw JsonCodecError("unknown scene kind '" + s + "'");
}

}  // namespace

json atom_to_json(const Atom& a) {
  json j = {{"op", atom_keyword(a)}};
  if (const auto* x = std::get_if<JointAngle>(&a)) {
    j["joint"] = x->joint;
    j["min_deg"] = x->min_deg;
    j["max_deg"] = x->max_deg;
  } else if (const auto* x = std::get_if<HandAt>(&a)) {
    j["target"] = x->target;
    j["radius_cm"] = x->radius_cm;
  } else if (const auto* x = std::get_if<Grasp>(&a)) {
    j["object"] = x->object;
  } else if (const auto* x = std::get_if<Release>(&a)) {
    j["object"] = x->object;
  } else if (const auto* x = std::get_if<ObjectAt>(&a)) {
    j["object"] = x->object;
    j["target"] = x->target;
    j["radius_cm"] = x->radius_cm;
  } else if (const auto* x = std::get_if<Rest>(&a)) {
    j["joint"] = x->joint;
    j["seconds"] = x->seconds;
  }
  return j;
}

Atom atom_from_json(const json& j) {
  const std::string op = str(j, "op");
  if (op == "joint_angle") return JointAngle{str(j, "joint"), num(j, "min_deg"), num(j, "max_deg")};
  if (op == "hand_at") return HandAt{str(j, "target"), num(j, "radius_cm")};
  if (op == "grasp") return Grasp{str(j, "object")};
  if (op == "release") return Release{str(j, "object")};
  if (op == "object_at") return ObjectAt{str(j, "object"), str(j, "target"), num(j, "radius_cm")};
  if (op == "rest") return Rest{str(j, "joint"), num(j, "seconds")};
  throw JsonCodecError("unknown atom op '" + op + "'");
}

json predicate_to_json(const Predicate& p) {
  if (const auto* a = std::get_if<Atom>(&p.node)) return atom_to_json(*a);
  if (const auto* all = std::get_if<AllOf>(&p.node)) {
    json terms = json::array();
    for (const auto& t : all->terms) terms.push_back(predicate_to_json(t));
    return {{"op", "all"}, {"terms", terms}};
  }
  if (const auto* any = std::get_if<AnyOf>(&p.node)) {
    json terms = json::array();
    for (const auto& t : any->terms) terms.push_back(predicate_to_json(t));
    return {{"op", "any"}, {"terms", terms}};
  }
  if (const auto* h = std::get_if<HoldFor>(&p.node)) {
    return {{"op", "hold"}, {"atom", atom_to_json(h->atom)}, {"seconds", h->seconds}};
  }
  const auto& c = std::get<CountOf>(p.node);
  return {{"op", "count"}, {"atom", atom_to_json(c.atom)}, {"times", c.times}};
}

Predicate predicate_from_json(const json& j) {
  const std::string op = str(j, "op");
  if (op == "all" || op == "any") {
    const json& terms = field(j, "terms");
    if (!terms.is_array()) throw JsonCodecError("'terms' must be an array");
    std::vector<Predicate> out;
    for (const auto& t : terms) out.push_back(predicate_from_json(t));
    if (op == "all") return Predicate(AllOf{std::move(out)});
    return Predicate(AnyOf{std::move(out)});
  }
  if (op == "hold") return Predicate(HoldFor{atom_from_json(field(j, "atom")), num(j, "seconds")});
  if (op == "count") return Predicate(CountOf{atom_from_json(field(j, "atom")), integer(j, "times")});
  return Predicate(atom_from_json(j));
}

json program_to_json(const InterventionProgram& p) {
  json scene = json::array();
  for (const auto& d : p.scene) {
    json e = {{"kind", to_string(d.kind)}, {"id", d.id}};
    if (d.position) e["position"] = {d.position->x, d.position->y, d.position->z};
    scene.push_back(std::move(e));
  }
  json steps = json::array();
  for (const auto& s : p.steps) {
    json e = {{"index", s.index}, {"say", s.utterance}};
    if (s.expect) e["expect"] = expectation_to_json(*s.expect);
    if (s.fallback) {
      e["fallback"] = {{"say", s.fallback->utterance},
                       {"expect", expectation_to_json(s.fallback->expect)}};
    }
    steps.push_back(std::move(e));
  }
  return {{"name", p.name}, {"scene", scene}, {"steps", steps}};
}

InterventionProgram program_from_json(const json& j) {
  InterventionProgram p;
  p.name = str(j, "name");
  const json& scene = field(j, "scene");
  const json& steps = field(j, "steps");
  if (!scene.is_array() || !steps.is_array()) throw JsonCodecError("'scene' and 'steps' must be arrays");
  for (const auto& e : scene) {
    SceneDecl d;
    d.kind = kind_from_string(str(e, "kind"));
    d.id = str(e, "id");
    if (auto it = e.find("position"); it != e.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 3) throw JsonCodecError("'position' must be [x, y, z]");
      for (const auto& c : *it) {
        if (!c.is_number()) throw JsonCodecError("'position' must be numeric");
      }
      d.position = Vec3{(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
    }
    p.scene.push_back(std::move(d));
  }
  for (const auto& e : steps) {
    Step s;
    s.index = integer(e, "index");
    s.utterance = str(e, "say");
    if (auto it = e.find("expect"); it != e.end() && !it->is_null()) {
      s.expect = expectation_from_json(*it);
    }
    if (auto it = e.find("fallback"); it != e.end() && !it->is_null()) {
      Fallback fb;
      fb.utterance = str(*it, "say");
      fb.expect = expectation_from_json(field(*it, "expect"));
      s.fallback = std::move(fb);
    }
    p.steps.push_back(std::move(s));
  }
  return p;
}

}  // namespace rehab::dsl
