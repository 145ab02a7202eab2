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
#include "rehab/dsl/semantics.hpp"

#include <cmath>
#include <set>
#include <string>

#include "rehab/common/vocabulary.hpp"

namespace rehab::dsl {

namespace {

class Checker {
 public:
  explicit Checker(const InterventionProgram& p) : p_(p) {}

  std::vector<Diagnostic> run() {
    check_scene();
    if (p_.steps.empty()) report(rules::kNoSteps, "program has no steps", {}, std::nullopt);
    int expected = 1;
    for (const auto& s : p_.steps) {
      if (s.index != expected) {
        report(rules::kNoncontiguousSteps,
               "step " + std::to_string(s.index) + " should be numbered " + std::to_string(expected),
               s.span, s.index);
      }
      expected = s.index + 1;
      check_step(s);
    }
    return std::move(out_);
  }

 private:
  void report(const char* rule, std::string message, const SourceSpan& span,
              std::optional<int> step) {
    Diagnostic d;
    d.kind = DiagnosticKind::kSemantic;
    d.rule = rule;
    d.message = std::move(message);
    d.span = span;
    d.step_index = step;
    out_.push_back(std::move(d));
  }

  void check_scene() {
    std::set<std::string> seen;
    for (const auto& d : p_.scene) {
      if (!seen.insert(d.id).second) {
        report(rules::kDuplicateId, "identifier '" + d.id + "' declared more than once", d.span,
               std::nullopt);
      }
      if (d.kind == SceneKind::kJoint) {
        if (!vocab::is_canonical_joint(d.id)) {
          report(rules::kUnknownJoint, "'" + d.id + "' is not a canonical joint", d.span,
                 std::nullopt);
        }
        if (d.position) {
          report(rules::kJointPosition, "joint '" + d.id + "' cannot have a position", d.span,
                 std::nullopt);
        }
      } else if (d.position) {
        const Vec3& v = *d.position;
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
          report(rules::kSyntaxError, "non-finite position for '" + d.id + "'", d.span,
                 std::nullopt);
        }
      }
    }
  }

  void check_step(const Step& s) {
    if (s.utterance.empty()) report(rules::kEmptyUtterance, "utterance is empty", s.span, s.index);
    if (s.fallback && !s.expect) {
      report(rules::kFallbackWithoutExpect, "fallback on a step without an expectation",
             s.fallback->span, s.index);
    }
    if (s.expect) check_expectation(*s.expect, s.span, s.index);
    if (s.fallback) {
      if (s.fallback->utterance.empty()) {
        report(rules::kEmptyUtterance, "fallback utterance is empty", s.fallback->span, s.index);
      }
      check_expectation(s.fallback->expect, s.fallback->span, s.index);
    }
  }

  void check_expectation(const Expectation& e, const SourceSpan& outer, int step) {
    if (!(e.timeout_s > 0) || !std::isfinite(e.timeout_s)) {
      report(rules::kBadTimeout, "timeout must be positive", outer, step);
    }
    const Predicate& pred = e.predicate;
    const SourceSpan& span = pred.span.end > pred.span.begin ? pred.span : outer;
    if (depth(pred) > kMaxPredicateDepth) {
      report(rules::kDepthExceeded,
             "predicate nesting depth " + std::to_string(depth(pred)) + " exceeds " +
                 std::to_string(kMaxPredicateDepth),
             span, step);
    }
    check_predicate(pred, e.timeout_s, outer, step);
  }

  void check_predicate(const Predicate& p, double timeout, const SourceSpan& outer, int step) {
    const SourceSpan& span = p.span.end > p.span.begin ? p.span : outer;
    if (const auto* a = std::get_if<Atom>(&p.node)) {
      check_atom(*a, span, step);
    } else if (const auto* all = std::get_if<AllOf>(&p.node)) {
      if (all->terms.empty()) report(rules::kEmptyComposite, "all() needs a term", span, step);
      for (const auto& t : all->terms) check_predicate(t, timeout, span, step);
    } else if (const auto* any = std::get_if<AnyOf>(&p.node)) {
      if (any->terms.empty()) report(rules::kEmptyComposite, "any() needs a term", span, step);
      for (const auto& t : any->terms) check_predicate(t, timeout, span, step);
    } else if (const auto* h = std::get_if<HoldFor>(&p.node)) {
      check_atom(h->atom, span, step);
      if (!(h->seconds > 0) || !std::isfinite(h->seconds)) {
        report(rules::kBadHold, "hold duration must be positive", span, step);
      } else if (h->seconds >= timeout) {
        report(rules::kHoldExceedsTimeout,
               "hold duration " + format_seconds(h->seconds) + " does not fit in timeout " +
                   format_seconds(timeout),
               span, step);
      }
    } else if (const auto* c = std::get_if<CountOf>(&p.node)) {
      check_atom(c->atom, span, step);
      if (c->times < 1) report(rules::kBadCount, "count must be at least 1", span, step);
    }
  }

  static std::string format_seconds(double s) {
    std::string text = std::to_string(s);
    text.erase(text.find_last_not_of('0') + 1);
    if (!text.empty() && text.back() == '.') text.pop_back();
    return text + "s";
  }

  void require(const std::string& id, SceneKind kind, const SourceSpan& span, int step) {
    const SceneDecl* d = p_.find_decl(id);
    if (d == nullptr) {
      report(rules::kUndeclaredId,
             "undeclared identifier '" + id + "' in step " + std::to_string(step), span, step);
    } else if (d->kind != kind) {
      report(rules::kKindMismatch,
             "'" + id + "' is a " + to_string(d->kind) + ", expected a " + to_string(kind), span,
             step);
    }
  }

  void check_radius(double r, const SourceSpan& span, int step) {
    if (!(r > 0) || !std::isfinite(r)) report(rules::kBadRadius, "radius must be positive", span, step);
  }

  void check_atom(const Atom& atom, const SourceSpan& span, int step) {
    if (const auto* a = std::get_if<JointAngle>(&atom)) {
      require(a->joint, SceneKind::kJoint, span, step);
      const bool in_range = a->min_deg >= 0 && a->min_deg < 360 && a->max_deg >= 0 &&
                            a->max_deg < 360;
      if (!in_range || !(a->min_deg < a->max_deg)) {
        report(rules::kBadAngleRange, "angle band must satisfy 0 <= min < max < 360", span, step);
      }
    } else if (const auto* a = std::get_if<HandAt>(&atom)) {
      require(a->target, SceneKind::kTarget, span, step);
      check_radius(a->radius_cm, span, step);
    } else if (const auto* a = std::get_if<Grasp>(&atom)) {
      require(a->object, SceneKind::kObject, span, step);
    } else if (const auto* a = std::get_if<Release>(&atom)) {
      require(a->object, SceneKind::kObject, span, step);
    } else if (const auto* a = std::get_if<ObjectAt>(&atom)) {
      require(a->object, SceneKind::kObject, span, step);
      require(a->target, SceneKind::kTarget, span, step);
      check_radius(a->radius_cm, span, step);
    } else if (const auto* a = std::get_if<Rest>(&atom)) {
      require(a->joint, SceneKind::kJoint, span, step);
      if (!(a->seconds > 0) || !std::isfinite(a->seconds)) {
        report(rules::kBadRestDuration, "rest duration must be positive", span, step);
      }
    }
  }

  const InterventionProgram& p_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate_semantics(const InterventionProgram& p) { return Checker(p).run(); }

}  // namespace rehab::dsl
