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
#include "rehab/stats/report.hpp"

#include <cstdio>
#include <sstream>

namespace rehab::stats {

namespace {

std::optional<Metric> metric(std::int64_t k, std::int64_t n, double gamma) {
  if (n == 0) return std::nullopt;
  Metric m;
  m.k = k;
  m.n = n;
  m.point = static_cast<double>(k) / static_cast<double>(n);
  m.ci = wilson_interval(k, n, gamma);
  return m;
}

nlohmann::json metric_json(const std::optional<Metric>& m) {
  if (!m) return nullptr;
  return {{"k", m->k}, {"n", m->n}, {"point", m->point}, {"ci", {m->ci.lower, m->ci.upper}}};
}

double ratio(std::int64_t k, std::int64_t n) {
  return n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
}

}  // namespace

double ErrorAttribution::hallucination_share() const { return ratio(hallucinated_steps, steps); }

double ErrorAttribution::hallucination_error_share() const {
  return ratio(incorrect_hallucinated, incorrect);
}

double PacingSummary::adequate_fraction() const { return ratio(adequate, total()); }

PacingSummary summarize_pacing(const std::vector<runtime::PacingVerdict>& verdicts) {
  PacingSummary s;
  for (auto v : verdicts) {
    switch (v) {
      case runtime::PacingVerdict::kAdequate: ++s.adequate; break;
      case runtime::PacingVerdict::kPremature: ++s.premature; break;
      case runtime::PacingVerdict::kDelayed: ++s.delayed; break;
    }
  }
  return s;
}

EvalReport build_report(const ConfusionMatrix& m, const std::vector<runtime::PacingVerdict>& pacing,
                        const ErrorAttribution& attribution, double gamma) {
  EvalReport r;
  r.matrix = m;
  r.gamma = gamma;
  r.accuracy = metric(m.tp + m.tn, m.n(), gamma);
  r.sensitivity = metric(m.tp, m.tp + m.fn, gamma);
  r.specificity = metric(m.tn, m.tn + m.fp, gamma);
  r.pacing = summarize_pacing(pacing);
  r.attribution = attribution;
  return r;
}

nlohmann::json report_to_json(const EvalReport& r) {
  const auto& a = r.attribution;
  return {
      {"matrix", matrix_to_json(r.matrix)},
      {"gamma", r.gamma},
      {"accuracy", metric_json(r.accuracy)},
      {"sensitivity", metric_json(r.sensitivity)},
      {"specificity", metric_json(r.specificity)},
      {"pacing",
       {{"adequate", r.pacing.adequate},
        {"premature", r.pacing.premature},
        {"delayed", r.pacing.delayed},
        {"adequate_fraction", r.pacing.adequate_fraction()}}},
      {"attribution",
       {{"steps", a.steps},
        {"hallucinated_steps", a.hallucinated_steps},
        {"hallucination_share", a.hallucination_share()},
        {"incorrect", a.incorrect},
        {"incorrect_hallucinated", a.incorrect_hallucinated},
        {"incorrect_noise", a.incorrect_noise()},
        {"hallucination_error_share", a.hallucination_error_share()}}},
  };
}

std::string report_to_text(const EvalReport& r) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %9s  %-22s\n", "metric", "point",
                (std::to_string(static_cast<int>(r.gamma * 100 + 0.5)) + "% CI (Wilson)").c_str());
  out << line;
  auto row = [&](const char* name, const std::optional<Metric>& m) {
    if (!m) {
      std::snprintf(line, sizeof line, "%-12s %9s  %-22s\n", name, "n/a", "");
    } else {
      std::snprintf(line, sizeof line, "%-12s %9.3f  (%.3f, %.3f)  %lld/%lld\n", name, m->point,
                    m->ci.lower, m->ci.upper, static_cast<long long>(m->k),
                    static_cast<long long>(m->n));
    }
    out << line;
  };
  row("accuracy", r.accuracy);
  row("sensitivity", r.sensitivity);
  row("specificity", r.specificity);
  std::snprintf(line, sizeof line, "confusion    tp=%lld fn=%lld tn=%lld fp=%lld\n",
                static_cast<long long>(r.matrix.tp), static_cast<long long>(r.matrix.fn),
                static_cast<long long>(r.matrix.tn), static_cast<long long>(r.matrix.fp));
  out << line;
  std::snprintf(line, sizeof line, "pacing       %.3f adequate (%lld/%lld), %lld premature, %lld delayed\n",
                r.pacing.adequate_fraction(), static_cast<long long>(r.pacing.adequate),
                static_cast<long long>(r.pacing.total()), static_cast<long long>(r.pacing.premature),
                static_cast<long long>(r.pacing.delayed));
  out << line;
  const auto& a = r.attribution;
  std::snprintf(line, sizeof line,
                "hallucinated monitors %.1f%% of steps (%lld/%lld); incorrect detections: %lld "
                "hallucination, %lld noise\n",
                100 * a.hallucination_share(), static_cast<long long>(a.hallucinated_steps),
                static_cast<long long>(a.steps), static_cast<long long>(a.incorrect_hallucinated),
                static_cast<long long>(a.incorrect_noise()));
  out << line;
  return out.str();
}

}  // namespace rehab::stats
