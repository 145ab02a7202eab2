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
#include "rehab/retrofit/retrofit.hpp"

#include <algorithm>
#include <regex>
#include <stdexcept>

#include "rehab/common/text.hpp"

namespace rehab::retrofit {

const char* to_string(Category c) {
  switch (c) {
    case Category::kProceduralVariation: return "ProceduralVariation";
    case Category::kNewEquipmentUse: return "NewEquipmentUse";
    case Category::kContingency: return "Contingency";
    case Category::kCompensatoryStrategyOptions: return "CompensatoryStrategyOptions";
    case Category::kMotorPriming: return "MotorPriming";
  }
  return "?";
}

Category category_from_string(const std::string& s) {
  for (auto c : {Category::kProceduralVariation, Category::kNewEquipmentUse, Category::kContingency,
                 Category::kCompensatoryStrategyOptions, Category::kMotorPriming}) {
    if (s == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown category '" + s + "'");
}

namespace {

const std::set<std::string> kMarkers = {"or", "instead", "may", "can", "if"};
const std::set<std::string> kMotionVerbs = {
    "rotate", "rotating", "lift",  "lifting", "move",      "moving",   "bend", "bending",
    "lean",   "leaning",  "reach", "reaching", "adduction", "abduction", "twist", "twisting"};
const std::set<std::string> kBodyParts = {"arm",   "arms", "body",   "trunk",   "shoulder",
                                          "elbow", "wrist", "hand",  "hands",   "finger",
                                          "fingers", "thumb", "leg", "legs"};

std::vector<std::string> normalized(const std::vector<genpipe::PrescriptionStep>& steps) {
  std::vector<std::string> out;
  for (const auto& s : steps) out.push_back(text::normalize_utterance(s.text));
  return out;
}

// Forward-reconstructed LCS pairs (i, j).
std::vector<std::pair<int, int>> lcs_pairs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> L(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      L[i][j] = a[i] == b[j] ? L[i + 1][j + 1] + 1 : std::max(L[i + 1][j], L[i][j + 1]);
    }
  }
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0, j = 0; i < n && j < m;) {
    if (a[i] == b[j] && L[i][j] == L[i + 1][j + 1] + 1) {
      out.emplace_back(static_cast<int>(i), static_cast<int>(j));
      ++i;
      ++j;
    } else if (L[i + 1][j] >= L[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

std::vector<double> hold_candidates(const genpipe::Prescription& rx) {
  static const std::regex kHold(R"(hold for ([0-9]+(\.[0-9]+)?) seconds)", std::regex::icase);
  std::vector<double> out{0};
  for (const auto& s : rx.steps) {
    std::smatch m;
    if (std::regex_search(s.text, m, kHold)) {
      const double v = std::stod(m[1].str());
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  return out;
}

template <typename T>
std::vector<T> default_first(T def, const std::vector<T>& all) {
  std::vector<T> out{def};
  for (const auto& x : all) {
    if (!(x == def)) out.push_back(x);
  }
  return out;
}

}  // namespace

bool offers_compensatory_strategy(const std::string& text_in) {
  std::string sentence;
  std::vector<std::string> sentences;
  for (char c : text_in) {
    if (c == '.' || c == '!' || c == '?' || c == ';') {
      sentences.push_back(sentence);
      sentence.clear();
    } else {
      sentence += c;
    }
  }
  sentences.push_back(sentence);
  for (const auto& s : sentences) {
    const auto ws = text::words(s);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (!kMarkers.count(ws[i])) continue;
      for (std::size_t k = i + 1; k < ws.size(); ++k) {
        if (kMotionVerbs.count(ws[k])) return true;
        if (ws[k] == "your") {
          for (std::size_t q = k + 1; q < ws.size() && q <= k + 3; ++q) {
            if (kBodyParts.count(ws[q])) return true;
          }
        }
      }
    }
  }
  return false;
}

std::set<Category> classify_incompatibility(const genpipe::Prescription& rx, const TemplateSchema& t,
                                            const MappingResidue& residue,
                                            std::map<int, std::vector<std::string>>* evidence) {
  std::set<Category> cats;
  auto note = [&](int rx_step, const std::string& rule) {
    if (evidence) (*evidence)[rx_step + 1].push_back(rule);
  };
  for (const auto& gap : residue.gaps) {
    bool all_explained = !gap.rx_steps.empty();
    bool all_preparatory = !gap.rx_steps.empty();
    for (int i : gap.rx_steps) {
      const auto& s = rx.steps[i];
      bool explained = false;
      if (s.entities.conditional) {
        cats.insert(Category::kContingency);
        note(i, "contingency: conditional clause");
        explained = true;
      }
      if (offers_compensatory_strategy(s.text)) {
        cats.insert(Category::kCompensatoryStrategyOptions);
        note(i, "compensatory_strategy: alternative body part or movement");
        explained = true;
      }
      if (s.entities.preparatory) {
        cats.insert(Category::kMotorPriming);
        note(i, "motor_priming: preparatory practice");
        explained = true;
      }
      all_explained = all_explained && explained;
      all_preparatory = all_preparatory && s.entities.preparatory;
    }
    const bool replacement = gap.rx_steps.size() == gap.template_steps.size() && all_explained;
    const bool priming_insert = gap.template_steps.empty() && all_preparatory;
    if (!replacement && !priming_insert) {
      cats.insert(Category::kProceduralVariation);
      for (int i : gap.rx_steps) note(i, "procedural_variation: no template step maps here");
      if (gap.rx_steps.empty() && evidence) {
        (*evidence)[0].push_back("procedural_variation: template step " +
                                 std::to_string(gap.template_steps.front() + 1) + " dropped");
      }
    }
  }
  for (std::size_t i = 0; i < rx.steps.size(); ++i) {
    const auto& e = rx.steps[i].entities;
    for (const auto* group : {&e.objects, &e.targets}) {
      for (const auto& id : *group) {
        if (!t.equipment.count(id)) {
          cats.insert(Category::kNewEquipmentUse);
          note(static_cast<int>(i), "new_equipment: " + id);
        }
      }
    }
  }
  return cats;
}

RetrofitVerdict retrofit_check(const genpipe::Prescription& rx, const TemplateSchema& t) {
  t.validate();
  const auto target = normalized(rx.steps);

  std::vector<Side> all_sides{Side::kLeft, Side::kRight, Side::kBilateral};
  std::vector<int> all_reps;
  for (int r = 1; r <= t.max_repetitions; ++r) all_reps.push_back(r);
  std::vector<std::size_t> all_diff;
  for (std::size_t d = 0; d < t.difficulty_options.size(); ++d) all_diff.push_back(d);

  RetrofitVerdict v;
  std::vector<std::pair<int, int>> best_pairs;
  std::vector<std::string> best_texts;
  int best = -1;
  for (Side side : default_first(t.default_side, all_sides)) {
    for (int reps : default_first(t.default_repetitions, all_reps)) {
      for (double hold : hold_candidates(rx)) {
        for (std::size_t diff : default_first(t.default_difficulty, all_diff)) {
          const TemplateParams p{side, reps, hold, diff};
          std::vector<genpipe::PrescriptionStep> steps;
          for (auto& s : instantiate_steps(t, p)) steps.push_back(std::move(s.step));
          const auto texts = normalized(steps);
          if (texts == target) {
            v.translatable = true;
            v.params = p;
            return v;
          }
          auto pairs = lcs_pairs(target, texts);
          if (static_cast<int>(pairs.size()) > best) {
            best = static_cast<int>(pairs.size());
            best_pairs = std::move(pairs);
            best_texts = texts;
            v.params = p;
          }
        }
      }
    }
  }

  MappingResidue residue;
  residue.params = v.params;
  int pi = 0, pj = 0;
  auto close_gap = [&](int i_end, int j_end) {
    Gap g;
    for (int i = pi; i < i_end; ++i) g.rx_steps.push_back(i);
    for (int j = pj; j < j_end; ++j) g.template_steps.push_back(j);
    if (!g.rx_steps.empty() || !g.template_steps.empty()) residue.gaps.push_back(std::move(g));
  };
  for (const auto& [i, j] : best_pairs) {
    close_gap(i, j);
    pi = i + 1;
    pj = j + 1;
  }
  close_gap(static_cast<int>(target.size()), static_cast<int>(best_texts.size()));

  v.categories = classify_incompatibility(rx, t, residue, &v.evidence);
  if (v.categories.empty()) {
    v.categories.insert(Category::kProceduralVariation);
    v.evidence[0].push_back("procedural_variation: parameters inconsistent across steps");
  }
  return v;
}

ParadigmComparison paradigm_comparison(const std::vector<ParadigmOutcome>& corpus) {
  if (corpus.empty()) throw std::invalid_argument("paradigm comparison needs a nonempty corpus");
  ParadigmComparison c;
  for (const auto& o : corpus) {
    ++(o.proposed_translatable ? c.table.a : c.table.b);
    ++(o.template_translatable ? c.table.c : c.table.d);
  }
  const double n = static_cast<double>(corpus.size());
  c.proposed_fraction = static_cast<double>(c.table.a) / n;
  c.template_fraction = static_cast<double>(c.table.c) / n;
  c.p_value = stats::fisher_exact_2x2(c.table);
  return c;
}

nlohmann::json verdict_to_json(const RetrofitVerdict& v) {
  nlohmann::json cats = nlohmann::json::array();
  for (auto c : v.categories) cats.push_back(to_string(c));
  nlohmann::json ev = nlohmann::json::object();
  for (const auto& [step, rules] : v.evidence) ev[std::to_string(step)] = rules;
  return {{"translatable", v.translatable},
          {"categories", cats},
          {"evidence", ev},
          {"params",
           {{"side", to_string(v.params.side)},
            {"repetitions", v.params.repetitions},
            {"hold_s", v.params.hold_s},
            {"difficulty", v.params.difficulty}}}};
}

}  // namespace rehab::retrofit
