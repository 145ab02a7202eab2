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
#include "rehab/retrofit/corpus.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rehab/dsl/parser.hpp"
#include "rehab/genpipe/template_generator.hpp"

namespace rehab::retrofit {

namespace fs = std::filesystem;

const char* to_string(Provenance p) {
  return p == Provenance::kQuoted ? "quoted" : "synthetic";
}

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

std::string template_file(int goal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "goal%02d.json", goal);
  return buf;
}

}  // namespace

std::map<int, TemplateSchema> load_templates(const std::string& templates_dir) {
  std::map<int, TemplateSchema> out;
  for (int g = 1; g <= 10; ++g) {
    const fs::path p = fs::path(templates_dir) / template_file(g);
    if (fs::exists(p)) out.emplace(g, load_template(p.string()));
  }
  return out;
}

Corpus load_corpus(const std::string& corpus_dir, const std::string& templates_dir) {
  Corpus c;
  const auto manifest = read_json(fs::path(corpus_dir) / "manifest.json");
  for (const auto& m : manifest.at("fixtures")) {
    CorpusEntry e;
    e.id = m.at("id").get<std::string>();
    e.goal_id = m.at("goal_id").get<int>();
    e.therapist = m.value("therapist", "");
    const auto prov = m.at("provenance").get<std::string>();
    if (prov == "quoted") {
      e.provenance = Provenance::kQuoted;
    } else if (prov == "synthetic") {
      e.provenance = Provenance::kSynthetic;
    } else {
      throw std::runtime_error("fixture " + e.id + ": unknown provenance '" + prov + "'");
    }
    e.expected_translatable = m.at("expected_translatable").get<bool>();
    for (const auto& cat : m.value("expected_categories", nlohmann::json::array())) {
      e.expected_categories.insert(category_from_string(cat.get<std::string>()));
    }
    e.note = m.value("note", "");
    e.rx = genpipe::prescription_from_json(read_json(fs::path(corpus_dir) / m.at("file").get<std::string>()));
    c.entries.push_back(std::move(e));
  }
  for (const auto& e : c.entries) {
    if (c.templates.count(e.goal_id)) continue;
    c.templates.emplace(e.goal_id, load_template((fs::path(templates_dir) / template_file(e.goal_id)).string()));
  }
  return c;
}

bool proposed_paradigm_translatable(const genpipe::Prescription& rx) {
  try {
    return dsl::parse_program(genpipe::generate_template_program(rx)).ok();
  } catch (const std::exception&) {
    return false;
  }
}

CorpusResult evaluate_corpus(const Corpus& corpus) {
  CorpusResult r;
  std::vector<ParadigmOutcome> outcomes;
  for (const auto& e : corpus.entries) {
    CorpusEntryResult er;
    er.id = e.id;
    er.verdict = retrofit_check(e.rx, corpus.templates.at(e.goal_id));
    er.proposed_translatable = proposed_paradigm_translatable(e.rx);
    er.matches_expectation = er.verdict.translatable == e.expected_translatable &&
                             er.verdict.categories == e.expected_categories;
    if (er.verdict.translatable) ++r.translatable;
    for (auto c : er.verdict.categories) ++r.category_counts[c];
    outcomes.push_back({er.verdict.translatable, er.proposed_translatable});
    r.entries.push_back(std::move(er));
  }
  r.comparison = paradigm_comparison(outcomes);
  return r;
}

std::vector<int> category_count_vector(const CorpusResult& r) {
  std::vector<int> out;
  for (auto c : {Category::kProceduralVariation, Category::kNewEquipmentUse, Category::kContingency,
                 Category::kCompensatoryStrategyOptions, Category::kMotorPriming}) {
    auto it = r.category_counts.find(c);
    out.push_back(it == r.category_counts.end() ? 0 : it->second);
  }
  return out;
}

nlohmann::json corpus_result_to_json(const CorpusResult& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    auto v = verdict_to_json(e.verdict);
    v["id"] = e.id;
    v["proposed_translatable"] = e.proposed_translatable;
    v["matches_expectation"] = e.matches_expectation;
    entries.push_back(std::move(v));
  }
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [c, n] : r.category_counts) counts[to_string(c)] = n;
  const auto& t = r.comparison.table;
  return {{"fixtures", entries},
          {"translatable", r.translatable},
          {"total", r.entries.size()},
          {"category_counts", counts},
          {"comparison",
           {{"table", {{t.a, t.b}, {t.c, t.d}}},
            {"proposed_fraction", r.comparison.proposed_fraction},
            {"template_fraction", r.comparison.template_fraction},
            {"fisher_p", r.comparison.p_value}}}};
}

}  // namespace rehab::retrofit
