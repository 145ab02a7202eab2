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
#ifndef REHAB_STATS_REPORT_HPP_
#define REHAB_STATS_REPORT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/runtime/pacing.hpp"
#include "rehab/stats/confusion.hpp"
#include "rehab/stats/wilson.hpp"

namespace rehab::stats {

/// A proportion with its Wilson interval; absent when the denominator is 0.
struct Metric {
  std::int64_t k = 0;
  std::int64_t n = 0;
  double point = 0;
  Interval ci;
};

/// How incorrect detections split between steps whose monitor carries a
/// hallucinated atom and steps that failed through detection noise alone.
struct ErrorAttribution {
  std::int64_t steps = 0;
  std::int64_t hallucinated_steps = 0;
  std::int64_t incorrect = 0;
  std::int64_t incorrect_hallucinated = 0;

  std::int64_t incorrect_noise() const { return incorrect - incorrect_hallucinated; }
  /// Share of monitored steps whose monitoring logic was hallucinated.
  double hallucination_share() const;
  /// Share of incorrect detections that fall on hallucinated steps.
  double hallucination_error_share() const;
};

struct PacingSummary {
  std::int64_t adequate = 0;
  std::int64_t premature = 0;
  std::int64_t delayed = 0;
  std::int64_t total() const { return adequate + premature + delayed; }
  double adequate_fraction() const;
};

struct EvalReport {
  ConfusionMatrix matrix;
  double gamma = 0.95;
  std::optional<Metric> accuracy;
  std::optional<Metric> sensitivity;
  std::optional<Metric> specificity;
  PacingSummary pacing;
  ErrorAttribution attribution;
};

PacingSummary summarize_pacing(const std::vector<runtime::PacingVerdict>& verdicts);

EvalReport build_report(const ConfusionMatrix& m, const std::vector<runtime::PacingVerdict>& pacing,
                        const ErrorAttribution& attribution, double gamma = 0.95);

nlohmann::json report_to_json(const EvalReport& r);

/// Metric / point / CI table followed by pacing and attribution lines.
std::string report_to_text(const EvalReport& r);

}  // namespace rehab::stats

#endif  // REHAB_STATS_REPORT_HPP_
