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
#ifndef REHAB_RETROFIT_CORPUS_HPP_
#define REHAB_RETROFIT_CORPUS_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/genpipe/prescription.hpp"
#include "rehab/retrofit/retrofit.hpp"
#include "rehab/retrofit/template.hpp"

namespace rehab::retrofit {

enum class Provenance { kQuoted, kSynthetic };

const char* to_string(Provenance p);

struct CorpusEntry {
  std::string id;
  int goal_id = 0;
  std::string therapist;
  Provenance provenance = Provenance::kSynthetic;
  bool expected_translatable = false;
  std::set<Category> expected_categories;
  std::string note;  // disjointness assumption or variant description
  genpipe::Prescription rx;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::map<int, TemplateSchema> templates;  // by goal id
};

/// Reads `<corpus_dir>/manifest.json` plus the prescription files it lists,
/// and `<templates_dir>/goalNN.json` for every goal the manifest references.
Corpus load_corpus(const std::string& corpus_dir, const std::string& templates_dir);

std::map<int, TemplateSchema> load_templates(const std::string& templates_dir);

struct CorpusEntryResult {
  std::string id;
  RetrofitVerdict verdict;
  bool proposed_translatable = false;
  bool matches_expectation = false;
};

struct CorpusResult {
  std::vector<CorpusEntryResult> entries;
  int translatable = 0;
  std::map<Category, int> category_counts;
  ParadigmComparison comparison;
};

/// Whether the proposed paradigm can deliver `rx`: the deterministic
/// generator's program parses and validates cleanly.
bool proposed_paradigm_translatable(const genpipe::Prescription& rx);

CorpusResult evaluate_corpus(const Corpus& corpus);

nlohmann::json corpus_result_to_json(const CorpusResult& r);

/// Counts in the order ProceduralVariation, NewEquipmentUse, Contingency,
/// CompensatoryStrategyOptions, MotorPriming.
std::vector<int> category_count_vector(const CorpusResult& r);

}  // namespace rehab::retrofit

#endif  // REHAB_RETROFIT_CORPUS_HPP_
