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
#ifndef REHAB_RETROFIT_RETROFIT_HPP_
#define REHAB_RETROFIT_RETROFIT_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/genpipe/prescription.hpp"
#include "rehab/retrofit/template.hpp"
#include "rehab/stats/fisher.hpp"

namespace rehab::retrofit {

enum class Category {
  kProceduralVariation,
  kNewEquipmentUse,
  kContingency,
  kCompensatoryStrategyOptions,
  kMotorPriming,
};

const char* to_string(Category c);
Category category_from_string(const std::string& s);

/// Steps left unmapped between two consecutive anchors of the best
/// alignment. Indices are 0-based.
struct Gap {
  std::vector<int> rx_steps;
  std::vector<int> template_steps;
};

struct MappingResidue {
  TemplateParams params;  // best instantiation
  std::vector<Gap> gaps;
};

struct RetrofitVerdict {
  bool translatable = false;
  std::set<Category> categories;
  std::map<int, std::vector<std::string>> evidence;  // 1-based rx step -> rules fired
  TemplateParams params;  // matching (translatable) or best instantiation
};

/// Decides whether `rx` equals some instantiation of `t` step for step
/// (normalized utterances), searching side, repetitions, hold time and
/// difficulty. Otherwise the residue of the best instantiation is classified.
RetrofitVerdict retrofit_check(const genpipe::Prescription& rx, const TemplateSchema& t);

/// Whether the sentence offers an alternative body part or movement route:
/// a clause marker (or, instead, may, can, if) followed in the same sentence
/// by a motion verb or a "your <body part>" phrase.
bool offers_compensatory_strategy(const std::string& text);

/// Category rules applied to the residue of the best mapping.
std::set<Category> classify_incompatibility(const genpipe::Prescription& rx, const TemplateSchema& t,
                                            const MappingResidue& residue,
                                            std::map<int, std::vector<std::string>>* evidence = nullptr);

struct ParadigmOutcome {
  bool template_translatable = false;
  bool proposed_translatable = false;
};

struct ParadigmComparison {
  stats::Table2x2 table;  // rows: proposed, template; columns: translatable, not
  double proposed_fraction = 0;
  double template_fraction = 0;
  double p_value = 1;
};

/// Throws std::invalid_argument for an empty corpus and std::domain_error
/// (from the Fisher test) when a margin of the table is zero.
ParadigmComparison paradigm_comparison(const std::vector<ParadigmOutcome>& corpus);

nlohmann::json verdict_to_json(const RetrofitVerdict& v);

}  // namespace rehab::retrofit

#endif  // REHAB_RETROFIT_RETROFIT_HPP_
