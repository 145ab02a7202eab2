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
#include "support/fixtures.hpp"

#include <stdexcept>

#include "rehab/common/vocabulary.hpp"
#include "rehab/dsl/parser.hpp"
#include "rehab/experiments/batch.hpp"
#include "rehab/genpipe/template_generator.hpp"

namespace rehab::testing {

namespace fs = std::filesystem;
using namespace dsl;

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rehab-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<genpipe::Prescription> worksheets() {
  static const auto ws = experiments::load_worksheets(data_path("worksheets"));
  return ws;
}

const genpipe::Prescription& worksheet(int goal) {
  static const auto ws = worksheets();
  return ws.at(static_cast<std::size_t>(goal - 1));
}

InterventionProgram faithful_program(const genpipe::Prescription& rx) {
  auto r = parse_program(genpipe::generate_template_program(rx));
  if (!r.ok()) throw std::runtime_error("generated program for " + rx.id + " does not validate");
  return *r.program;
}

sim::BehaviorScript complete_all(const InterventionProgram& p, double offset_s) {
  sim::BehaviorScript s;
  for (const auto& step : p.steps) {
    if (step.monitored()) s.steps[step.index] = sim::Behavior::complete_at(offset_s);
  }
  return s;
}

namespace {

// Two decimals keep generated literals readable; the printer handles any
// finite double.
double num(Rng& rng, double lo, double hi) {
  return static_cast<double>(static_cast<long>(rng.uniform(lo, hi) * 100)) / 100.0;
}

std::string pick(Rng& rng, const std::vector<std::string>& v) { return v[rng.below(v.size())]; }

std::string utterance(Rng& rng) {
  static const std::vector<std::string> words = {
      "lift", "your", "right", "arm", "slowly", "\"now\"", "back\\slash", "tab\there",
      "line\nbreak", "post-it", "10", "inches", "hold", "it", "rest", "cube", "é"};
  std::string out;
  const auto n = 1 + rng.below(8);
  for (std::uint64_t i = 0; i < n; ++i) out += (i ? " " : "") + pick(rng, words);
  return out;
}

struct Names {
  std::vector<std::string> targets, objects, joints;
};

Atom random_atom(Rng& rng, const Names& n) {
  switch (rng.below(6)) {
    case 0: {
      const double lo = num(rng, 0, 300);
      return JointAngle{pick(rng, n.joints), lo, lo + 0.01 + num(rng, 0, 359.98 - lo)};
    }
    case 1: return HandAt{pick(rng, n.targets), num(rng, 0.5, 30)};
    case 2: return Grasp{pick(rng, n.objects)};
    case 3: return Release{pick(rng, n.objects)};
    case 4: return ObjectAt{pick(rng, n.objects), pick(rng, n.targets), num(rng, 0.5, 30)};
    default: return Rest{pick(rng, n.joints), num(rng, 0.5, 5)};
  }
}

Predicate random_predicate(Rng& rng, const Names& n, int depth_left, double timeout) {
  const auto choice = depth_left <= 1 ? 0 : rng.below(5);
  switch (choice) {
    case 0: return random_atom(rng, n);
    case 1: return HoldFor{random_atom(rng, n), num(rng, 0.1, timeout)};
    case 2: return CountOf{random_atom(rng, n), static_cast<int>(1 + rng.below(5))};
    default: {
      std::vector<Predicate> terms;
      const auto k = 1 + rng.below(3);
      for (std::uint64_t i = 0; i < k; ++i) terms.push_back(random_predicate(rng, n, depth_left - 1, timeout));
      if (choice == 3) return AllOf{std::move(terms)};
      return AnyOf{std::move(terms)};
    }
  }
}

Expectation random_expectation(Rng& rng, const Names& n) {
  Expectation e;
  e.timeout_s = num(rng, 1, 60);
  e.predicate = random_predicate(rng, n, static_cast<int>(1 + rng.below(kMaxPredicateDepth)), e.timeout_s);
  return e;
}

}  // namespace

InterventionProgram random_program(Rng& rng) {
  InterventionProgram p;
  p.name = "prog_" + std::to_string(rng.below(1000));
  Names n;
  const auto joints = vocab::canonical_joints();
  const auto nt = 1 + rng.below(3), no = 1 + rng.below(3), nj = 1 + rng.below(3);
  for (std::uint64_t i = 0; i < nt; ++i) {
    n.targets.push_back("t" + std::to_string(i));
    p.scene.push_back({SceneKind::kTarget, n.targets.back(), Vec3{num(rng, -50, 50), num(rng, -50, 50), num(rng, 0, 20)}, {}});
  }
  for (std::uint64_t i = 0; i < no; ++i) {
    n.objects.push_back("obj_" + std::to_string(i));
    p.scene.push_back({SceneKind::kObject, n.objects.back(), Vec3{num(rng, -50, 50), num(rng, -50, 50), 0}, {}});
  }
  for (std::uint64_t i = 0; i < nj; ++i) {
    const auto& name = joints[(rng.below(joints.size()) + i) % joints.size()].name;
    if (std::find(n.joints.begin(), n.joints.end(), name) != n.joints.end()) continue;
    n.joints.push_back(name);
    p.scene.push_back({SceneKind::kJoint, name, std::nullopt, {}});
  }
  const auto steps = 1 + rng.below(8);
  for (std::uint64_t i = 0; i < steps; ++i) {
    Step s;
    s.index = static_cast<int>(i + 1);
    s.utterance = utterance(rng);
    if (rng.bernoulli(0.7)) {
      s.expect = random_expectation(rng, n);
      if (rng.bernoulli(0.3)) s.fallback = Fallback{utterance(rng), random_expectation(rng, n), {}};
    }
    p.steps.push_back(std::move(s));
  }
  return p;
}

sim::BehaviorScript random_script(const InterventionProgram& p, Rng& rng) {
  sim::BehaviorScript s;
  for (const auto& step : p.steps) {
    if (!step.monitored()) continue;
    switch (rng.below(3)) {
      case 0: s.steps[step.index] = sim::Behavior::complete_at(rng.uniform(2, 8)); break;
      case 1: s.steps[step.index] = sim::Behavior::no_attempt(); break;
      default: s.steps[step.index] = sim::Behavior::partial(rng.uniform(0.3, 0.9)); break;
    }
  }
  return s;
}

}  // namespace rehab::testing
