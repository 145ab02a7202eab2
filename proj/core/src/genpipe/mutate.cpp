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
#include "rehab/genpipe/mutate.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "rehab/common/rng.hpp"
#include "rehab/common/text.hpp"
#include "rehab/common/vocabulary.hpp"

namespace rehab::genpipe {

using namespace rehab::dsl;

const char* to_string(MutationKind k) {
  switch (k) {
    case MutationKind::kOmit: return "omit";
    case MutationKind::kDuplicate: return "duplicate";
    case MutationKind::kSubstitute: return "substitute";
    case MutationKind::kReorder: return "reorder";
    case MutationKind::kHallucinateAtom: return "hallucinate-atom";
  }
  return "?";
}

MutationKind mutation_kind_from_string(const std::string& s) {
  for (auto k : {MutationKind::kOmit, MutationKind::kDuplicate, MutationKind::kSubstitute,
                 MutationKind::kReorder, MutationKind::kHallucinateAtom}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown mutation kind '" + s + "'");
}

std::string MutationLabel::key() const {
  return program + "/" + to_string(kind) + "/" + std::to_string(step) + "/" + detail;
}

namespace {

void renumber(InterventionProgram& p) {
  int i = 0;
  for (auto& s : p.steps) s.index = ++i;
}

std::vector<int> unique_steps(const InterventionProgram& p) {
  std::map<std::string, int> counts;
  for (const auto& s : p.steps) ++counts[text::normalize_utterance(s.utterance)];
  std::vector<int> out;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (counts[text::normalize_utterance(p.steps[i].utterance)] == 1) out.push_back(static_cast<int>(i));
  }
  return out;
}

int pick(Rng& rng, const std::vector<int>& from) {
  return from[rng.below(from.size())];
}

std::string perturb(const std::string& s, Rng& rng) {
  std::vector<std::size_t> letters;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::isalpha(static_cast<unsigned char>(s[i]))) letters.push_back(i);
  }
  const std::size_t edits = std::max<std::size_t>(1, s.size() / 14);
  std::string out = s;
  for (std::size_t e = 0; e < edits && !letters.empty(); ++e) {
    const std::size_t k = rng.below(letters.size());
    const std::size_t pos = letters[k];
    letters.erase(letters.begin() + static_cast<long>(k));
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(out[pos])));
    out[pos] = static_cast<char>('a' + (c - 'a' + 1 + static_cast<int>(rng.below(24))) % 26);
  }
  return out;
}

std::set<std::string> joints_in(const InterventionProgram& p) {
  std::set<std::string> out;
  for (const auto& d : p.scene) {
    if (d.kind == SceneKind::kJoint) out.insert(d.id);
  }
  return out;
}

}  // namespace

Mutation mutate_program(const InterventionProgram& p, MutationKind kind, std::uint64_t seed,
                        const Prescription* rx) {
  Rng rng(seed);
  Mutation m{p, {}};
  MutationLabel& l = m.label;
  l.kind = kind;
  l.program = p.name;
  l.seed = seed;
  auto& steps = m.program.steps;
  const int n = static_cast<int>(p.steps.size());

  switch (kind) {
    case MutationKind::kOmit: {
      const auto candidates = unique_steps(p);
      if (n < 2 || candidates.empty()) throw MutationImpossible("omit needs a program with at least two steps");
      const int i = pick(rng, candidates);
      l.step = i + 1;
      l.text = p.steps[i].utterance;
      steps.erase(steps.begin() + i);
      break;
    }
    case MutationKind::kDuplicate: {
      if (n < 1) throw MutationImpossible("duplicate needs a step");
      const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      l.step = i + 1;
      l.program_step = i + 2;
      l.text = p.steps[i].utterance;
      steps.insert(steps.begin() + i + 1, p.steps[i]);
      break;
    }
    case MutationKind::kSubstitute: {
      const auto candidates = unique_steps(p);
      if (candidates.empty()) throw MutationImpossible("substitute needs a step with a unique utterance");
      const int i = pick(rng, candidates);
      std::string changed;
      for (int attempt = 0; attempt < 16; ++attempt) {
        changed = perturb(p.steps[i].utterance, rng);
        const auto norm = text::normalize_utterance(changed);
        const bool clash = std::any_of(p.steps.begin(), p.steps.end(), [&](const Step& s) {
          return text::normalize_utterance(s.utterance) == norm;
        });
        if (!clash) break;
        changed.clear();
      }
      if (changed.empty()) throw MutationImpossible("could not perturb step " + std::to_string(i + 1));
      l.step = i + 1;
      l.program_step = i + 1;
      l.text = p.steps[i].utterance;
      l.detail = changed;
      steps[i].utterance = changed;
      break;
    }
    case MutationKind::kReorder: {
      const auto candidates = unique_steps(p);
      if (n < 3 || candidates.empty()) throw MutationImpossible("reorder needs at least three steps");
      const int i = pick(rng, candidates);
      std::vector<int> dests;
      for (int j = 0; j < n; ++j) {
        if (std::abs(j - i) >= 2) dests.push_back(j);
      }
      const int j = pick(rng, dests);
      Step moved = steps[i];
      steps.erase(steps.begin() + i);
      steps.insert(steps.begin() + j, std::move(moved));
      l.step = i + 1;
      l.program_step = j + 1;
      l.text = p.steps[i].utterance;
      l.detail = "moved to " + std::to_string(j + 1);
      break;
    }
    case MutationKind::kHallucinateAtom: {
      std::vector<int> monitored;
      for (int i = 0; i < n; ++i) {
        if (p.steps[i].expect) monitored.push_back(i);
      }
      if (monitored.empty()) throw MutationImpossible("hallucinate-atom needs a monitored step");
      std::set<std::string> used = joints_in(p);
      if (rx) {
        const auto v = global_vocabulary(*rx);
        used.insert(v.joints.begin(), v.joints.end());
      }
      std::vector<std::string> absent;
      for (const auto& j : vocab::canonical_joints()) {
        if (!used.count(j.name)) absent.push_back(j.name);
      }
      if (absent.empty()) throw MutationImpossible("every joint is already prescribed");
      const int i = pick(rng, monitored);
      const std::string joint = absent[rng.below(absent.size())];
      Predicate extra = Atom{JointAngle{joint, 10, 40}};
      Predicate& pred = steps[i].expect->predicate;
      if (auto* all = std::get_if<AllOf>(&pred.node)) {
        all->terms.push_back(std::move(extra));
      } else {
        pred = AllOf{{std::move(pred), std::move(extra)}};
      }
      SceneDecl d;
      d.kind = SceneKind::kJoint;
      d.id = joint;
      m.program.scene.push_back(std::move(d));
      l.step = i + 1;
      l.program_step = i + 1;
      l.text = p.steps[i].utterance;
      l.detail = joint;
      break;
    }
  }
  renumber(m.program);
  return m;
}

nlohmann::json label_to_json(const MutationLabel& l) {
  return {{"kind", to_string(l.kind)}, {"program", l.program}, {"step", l.step},
          {"program_step", l.program_step}, {"text", l.text}, {"detail", l.detail},
          {"seed", l.seed}};
}

}  // namespace rehab::genpipe
