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
#ifndef REHAB_EXPERIMENTS_REPRODUCTION_SUITE_HPP_
#define REHAB_EXPERIMENTS_REPRODUCTION_SUITE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/experiments/batch.hpp"
#include "rehab/genpipe/mutate.hpp"
#include "rehab/retrofit/corpus.hpp"

namespace rehab::experiments {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

// ---- fidelity ------------------------------------------------------------

struct MutationCheck {
  genpipe::MutationLabel label;
  bool detected = false;  // the injected defect got the expected verdict
  int extra_flags = 0;    // any other verdict or finding
};

/// Runs both validators on a mutated worksheet program and compares them
/// with the label.
MutationCheck verify_mutation(const genpipe::Prescription& rx, const genpipe::Mutation& m);

struct FidelitySuite {
  int worksheet_steps = 0;
  int faithful_programs = 0;  // correct and complete
  std::vector<MutationCheck> mutations;

  int detected() const;
  int extra_flags() const;
};

/// Cycles mutation kinds over the worksheets, skipping duplicate labels,
/// until `count` distinct mutations are collected.
FidelitySuite run_fidelity_suite(const std::vector<genpipe::Prescription>& worksheets, int count,
                                 std::uint64_t base_seed);

// ---- whole suite ---------------------------------------------------------

struct SuiteConfig {
  std::string data_dir;
  std::uint64_t seed = 7;
  int accuracy_seeds = 20;
  int mutations = 100;
  int hallucinated_steps = 10;
  double fp_rate = 0;  // 0 selects the frozen calibration
  double fn_rate = 0;
};

struct SuiteResult {
  std::vector<Check> checks;
  nlohmann::json details;
  std::string monitoring_table;
  std::string category_table;

  bool all_passed() const;
};

SuiteResult run_reproduction_suite(const SuiteConfig& config);

/// Writes summary.json, report.txt, monitoring.txt, categories.txt and checks.json.
void write_suite_report(const SuiteResult& r, const std::string& out_dir);

std::string category_table_text(const retrofit::CorpusResult& r);

}  // namespace rehab::experiments

#endif  // REHAB_EXPERIMENTS_REPRODUCTION_SUITE_HPP_
