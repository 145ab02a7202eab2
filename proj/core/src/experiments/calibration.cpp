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
#include "rehab/experiments/calibration.hpp"

#include <cmath>
#include <stdexcept>

namespace rehab::experiments {

SeedSummary run_seeds(const std::vector<genpipe::Prescription>& worksheets, BatchConfig base,
                      const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("need at least one seed");
  SeedSummary s;
  for (auto seed : seeds) {
    base.seed = seed;
    const auto r = run_batch(worksheets, base);
    const auto& rep = r.report;
    s.accuracies.push_back(rep.accuracy ? rep.accuracy->point : 0);
    s.mean_accuracy += s.accuracies.back();
    s.mean_sensitivity += rep.sensitivity ? rep.sensitivity->point : 0;
    s.mean_specificity += rep.specificity ? rep.specificity->point : 0;
    s.mean_adequacy += rep.pacing.adequate_fraction();
  }
  const double n = static_cast<double>(seeds.size());
  s.mean_accuracy /= n;
  s.mean_sensitivity /= n;
  s.mean_specificity /= n;
  s.mean_adequacy /= n;
  return s;
}

CalibrationResult calibrate(const std::vector<genpipe::Prescription>& worksheets,
                            const std::vector<std::uint64_t>& seeds, int iterations) {
  CalibrationResult c;
  BatchConfig cfg;

  // Specificity falls as fp grows.
  double lo = std::log(1e-6), hi = std::log(1e-1);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    cfg.fp_rate = std::exp(mid);
    const double spec = run_seeds(worksheets, cfg, seeds).mean_specificity;
    c.trace.push_back({'p', cfg.fp_rate, spec});
    (spec > kTargetSpecificity ? lo : hi) = mid;
  }
  c.fp_rate = std::exp(0.5 * (lo + hi));
  cfg.fp_rate = c.fp_rate;

  // Sensitivity falls as fn grows.
  double flo = 0, fhi = 0.999;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (flo + fhi);
    cfg.fn_rate = mid;
    const double sens = run_seeds(worksheets, cfg, seeds).mean_sensitivity;
    c.trace.push_back({'n', mid, sens});
    (sens > kTargetSensitivity ? flo : fhi) = mid;
  }
  c.fn_rate = 0.5 * (flo + fhi);
  cfg.fn_rate = c.fn_rate;
  c.summary = run_seeds(worksheets, cfg, seeds);
  return c;
}

nlohmann::json calibration_to_json(const CalibrationResult& c) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : c.trace) {
    trace.push_back({{"rate", t.rate == 'p' ? "fp" : "fn"}, {"value", t.value}, {"metric", t.metric}});
  }
  return {{"fp_rate", c.fp_rate},
          {"fn_rate", c.fn_rate},
          {"mean_accuracy", c.summary.mean_accuracy},
          {"mean_sensitivity", c.summary.mean_sensitivity},
          {"mean_specificity", c.summary.mean_specificity},
          {"mean_adequacy", c.summary.mean_adequacy},
          {"trace", trace}};
}

}  // namespace rehab::experiments
