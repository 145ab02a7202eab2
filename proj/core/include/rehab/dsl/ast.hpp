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
#ifndef REHAB_DSL_AST_HPP_
#define REHAB_DSL_AST_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace rehab::dsl {

/// 1-based line/column of a byte in the source.
struct SourceLoc {
  int line = 0;
  int column = 0;
  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

/// Half-open byte range [begin, end) plus the location of `begin`.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  SourceLoc loc;
  bool contains(const SourceSpan& inner) const {
    return begin <= inner.begin && inner.end <= end;
  }
};

struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

enum class SceneKind { kTarget, kObject, kJoint };

const char* to_string(SceneKind kind);

struct SceneDecl {
  SceneKind kind = SceneKind::kTarget;
  std::string id;
  std::optional<Vec3> position;  // targets and objects only
  SourceSpan span;

  friend bool operator==(const SceneDecl& a, const SceneDecl& b) {
    return a.kind == b.kind && a.id == b.id && a.position == b.position;
  }
};

// ---- monitor atoms -------------------------------------------------------

struct JointAngle {
  std::string joint;
  double min_deg = 0;
  double max_deg = 0;
  friend bool operator==(const JointAngle&, const JointAngle&) = default;
};

struct HandAt {
  std::string target;
  double radius_cm = 0;
  friend bool operator==(const HandAt&, const HandAt&) = default;
};

struct Grasp {
  std::string object;
  friend bool operator==(const Grasp&, const Grasp&) = default;
};

struct Release {
  std::string object;
  friend bool operator==(const Release&, const Release&) = default;
};

struct ObjectAt {
  std::string object;
  std::string target;
  double radius_cm = 0;
  friend bool operator==(const ObjectAt&, const ObjectAt&) = default;
};

struct Rest {
  std::string joint;
  double seconds = 0;
  friend bool operator==(const Rest&, const Rest&) = default;
};

using Atom = std::variant<JointAngle, HandAt, Grasp, Release, ObjectAt, Rest>;

/// Name of the atom in the surface syntax, e.g. "hand_at".
const char* atom_keyword(const Atom& atom);

// ---- predicates ----------------------------------------------------------

struct Predicate;

struct AllOf {
  std::vector<Predicate> terms;
};

struct AnyOf {
  std::vector<Predicate> terms;
};

struct HoldFor {
  Atom atom;
  double seconds = 0;
  friend bool operator==(const HoldFor&, const HoldFor&) = default;
};

struct CountOf {
  Atom atom;
  int times = 0;
  friend bool operator==(const CountOf&, const CountOf&) = default;
};

struct Predicate {
  std::variant<Atom, AllOf, AnyOf, HoldFor, CountOf> node;
  SourceSpan span;

  Predicate() = default;
  template <typename T>
    requires(!std::is_same_v<std::decay_t<T>, Predicate>)
  Predicate(T value) : node(std::move(value)) {}  // NOLINT(google-explicit-constructor)
};

bool operator==(const Predicate& a, const Predicate& b);
bool operator==(const AllOf& a, const AllOf& b);
bool operator==(const AnyOf& a, const AnyOf& b);

/// Nesting depth; a bare atom has depth 1, hold/count over an atom depth 2.
int depth(const Predicate& p);

/// Every atom in the predicate, in source order.
std::vector<const Atom*> atoms_of(const Predicate& p);

// ---- program -------------------------------------------------------------

struct Expectation {
  Predicate predicate;
  double timeout_s = 0;
  friend bool operator==(const Expectation&, const Expectation&) = default;
};

struct Fallback {
  std::string utterance;
  Expectation expect;
  SourceSpan span;
  friend bool operator==(const Fallback& a, const Fallback& b) {
    return a.utterance == b.utterance && a.expect == b.expect;
  }
};

struct Step {
  int index = 0;
  std::string utterance;
  std::optional<Expectation> expect;
  std::optional<Fallback> fallback;
  SourceSpan span;

  bool monitored() const { return expect.has_value(); }

  friend bool operator==(const Step& a, const Step& b) {
    return a.index == b.index && a.utterance == b.utterance && a.expect == b.expect &&
           a.fallback == b.fallback;
  }
};

struct InterventionProgram {
  std::string name;
  std::vector<SceneDecl> scene;
  std::vector<Step> steps;

  const SceneDecl* find_decl(std::string_view id) const;
  int monitored_step_count() const;

  friend bool operator==(const InterventionProgram&, const InterventionProgram&) = default;
};

}  // namespace rehab::dsl

#endif  // REHAB_DSL_AST_HPP_
