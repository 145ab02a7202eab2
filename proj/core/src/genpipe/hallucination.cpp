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
#include "rehab/genpipe/hallucination.hpp"

#include <cmath>
#include <optional>

#include "rehab/common/vocabulary.hpp"
#include "rehab/dsl/json_codec.hpp"
#include "rehab/dsl/printer.hpp"
#include "rehab/genpipe/template_generator.hpp"

namespace rehab::genpipe {

using namespace rehab::dsl;

const char* to_string(HallucinationReason r) {
  switch (r) {
    case HallucinationReason::kUnprescribedJoint: return "unprescribed_joint";
    case HallucinationReason::kUnprescribedObject: return "unprescribed_object";
    case HallucinationReason::kUnprescribedTarget: return "unprescribed_target";
    case HallucinationReason::kUnprescribedThreshold: return "unprescribed_threshold";
  }
  return "?";
}

namespace {

bool near(double v, double ref) {
  return std::abs(v - ref) <= kThresholdTolerance * std::abs(ref) + 1e-9;
}

class Checker {
 public:
  explicit Checker(const Prescription& rx) : vocab_(global_vocabulary(rx)) {
    for (const auto& t : vocab_.thresholds) {
      if (t.unit == "deg") degs_.push_back(t.quantity);
      if (t.unit == "cm") cms_.push_back(t.quantity);
      if (t.unit == "in") cms_.push_back(t.quantity * vocab::kCentimetersPerInch);
      if (t.unit == "s") secs_.push_back(t.quantity);
      if (t.unit == "reps") reps_.push_back(t.quantity);
    }
  }

  void check(int step, bool fallback, const Predicate& pred, std::vector<HallucinationFinding>& out) const {
    if (const auto* a = std::get_if<Atom>(&pred.node)) {
      check_atom(step, fallback, *a, out);
    } else if (const auto* all = std::get_if<AllOf>(&pred.node)) {
      for (const auto& t : all->terms) check(step, fallback, t, out);
    } else if (const auto* any = std::get_if<AnyOf>(&pred.node)) {
      for (const auto& t : any->terms) check(step, fallback, t, out);
    } else if (const auto* h = std::get_if<HoldFor>(&pred.node)) {
      if (!check_atom(step, fallback, h->atom, out) && !prescribed(secs_, h->seconds) &&
          h->seconds != vocab::kDefaultRestSeconds) {
        out.push_back({step, h->atom, format_number(h->seconds) + "s",
                       HallucinationReason::kUnprescribedThreshold, fallback});
      }
    } else if (const auto* c = std::get_if<CountOf>(&pred.node)) {
      if (!check_atom(step, fallback, c->atom, out) && !prescribed(reps_, c->times)) {
        out.push_back({step, c->atom, std::to_string(c->times) + " times",
                       HallucinationReason::kUnprescribedThreshold, fallback});
      }
    }
  }

 private:
  static bool prescribed(const std::vector<double>& refs, double v) {
    for (double r : refs) {
      if (near(v, r)) return true;
    }
    return false;
  }

  bool angle_ok(const std::string& joint, double v) const {
    for (double r : degs_) {
      if (near(v, r) || near(v, r - kSingleThresholdToleranceDeg) ||
          near(v, r + kSingleThresholdToleranceDeg)) {
        return true;
      }
    }
    if (const auto* spec = vocab::find_joint(joint)) {
      if (v == spec->default_band.min_deg || v == spec->default_band.max_deg) return true;
    }
    return false;
  }

  bool radius_ok(double v, double default_value) const { return v == default_value || prescribed(cms_, v); }

  // Returns true when a finding was recorded.
  bool check_atom(int step, bool fallback, const Atom& a, std::vector<HallucinationFinding>& out) const {
    auto flag = [&](std::string symbol, HallucinationReason r) {
      out.push_back({step, a, std::move(symbol), r, fallback});
      return true;
    };
    if (const auto* x = std::get_if<JointAngle>(&a)) {
      if (!vocab_.joints.count(x->joint)) return flag(x->joint, HallucinationReason::kUnprescribedJoint);
      if (!angle_ok(x->joint, x->min_deg)) return flag(format_number(x->min_deg) + " deg", HallucinationReason::kUnprescribedThreshold);
      if (!angle_ok(x->joint, x->max_deg)) return flag(format_number(x->max_deg) + " deg", HallucinationReason::kUnprescribedThreshold);
    } else if (const auto* x = std::get_if<HandAt>(&a)) {
      if (!vocab_.targets.count(x->target)) return flag(x->target, HallucinationReason::kUnprescribedTarget);
      if (!radius_ok(x->radius_cm, vocab::kDefaultHandRadiusCm)) return flag(format_number(x->radius_cm) + " cm", HallucinationReason::kUnprescribedThreshold);
    } else if (const auto* x = std::get_if<Grasp>(&a)) {
      if (!vocab_.objects.count(x->object)) return flag(x->object, HallucinationReason::kUnprescribedObject);
    } else if (const auto* x = std::get_if<Release>(&a)) {
      if (!vocab_.objects.count(x->object)) return flag(x->object, HallucinationReason::kUnprescribedObject);
    } else if (const auto* x = std::get_if<ObjectAt>(&a)) {
      if (!vocab_.objects.count(x->object)) return flag(x->object, HallucinationReason::kUnprescribedObject);
      if (!vocab_.targets.count(x->target)) return flag(x->target, HallucinationReason::kUnprescribedTarget);
      if (!radius_ok(x->radius_cm, vocab::kDefaultObjectRadiusCm)) return flag(format_number(x->radius_cm) + " cm", HallucinationReason::kUnprescribedThreshold);
    } else if (const auto* x = std::get_if<Rest>(&a)) {
      if (!vocab_.joints.count(x->joint)) return flag(x->joint, HallucinationReason::kUnprescribedJoint);
      if (x->seconds != vocab::kDefaultRestSeconds && !prescribed(secs_, x->seconds)) {
        return flag(format_number(x->seconds) + "s", HallucinationReason::kUnprescribedThreshold);
      }
    }
    return false;
  }

  Vocabulary vocab_;
  std::vector<double> degs_, cms_, secs_, reps_;
};

}  // namespace

std::vector<HallucinationFinding> detect_hallucinated_monitors(const Prescription& rx,
                                                               const InterventionProgram& p) {
  const Checker checker(rx);
  std::vector<HallucinationFinding> out;
  for (const auto& s : p.steps) {
    if (s.expect) checker.check(s.index, false, s.expect->predicate, out);
    if (s.fallback) checker.check(s.index, true, s.fallback->expect.predicate, out);
  }
  return out;
}

nlohmann::json finding_to_json(const HallucinationFinding& f) {
  return {{"step", f.step_index},
          {"atom", atom_to_json(f.atom)},
          {"symbol", f.symbol},
          {"reason", to_string(f.reason)},
          {"fallback", f.fallback}};
}

}  // namespace rehab::genpipe
