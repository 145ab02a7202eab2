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
#include "rehab/genpipe/fidelity.hpp"

#include <algorithm>

#include "rehab/common/text.hpp"

namespace rehab::genpipe {

const char* to_string(StepVerdict v) {
  switch (v) {
    case StepVerdict::kMatch: return "Match";
    case StepVerdict::kOmitted: return "Omitted";
    case StepVerdict::kExtraneous: return "Extraneous";
    case StepVerdict::kSubstituted: return "Substituted";
    case StepVerdict::kReordered: return "Reordered";
  }
  return "?";
}

std::vector<AlignedStep> FidelityReport::mismatches() const {
  std::vector<AlignedStep> out;
  for (const auto& s : steps) {
    if (s.verdict != StepVerdict::kMatch) out.push_back(s);
  }
  return out;
}

FidelityReport validate_fidelity(const std::vector<std::string>& rx_texts,
                                 const std::vector<std::string>& program_utterances) {
  std::vector<std::string> a, b;
  for (const auto& s : rx_texts) a.push_back(text::normalize_utterance(s));
  for (const auto& s : program_utterances) b.push_back(text::normalize_utterance(s));
  const std::size_t n = a.size(), m = b.size();

  // lcs[i][j]: LCS length of a[i..] and b[j..].
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::vector<int> rx_to_prog(n, -1), prog_to_rx(m, -1);
  for (std::size_t i = 0, j = 0; i < n && j < m;) {
    if (a[i] == b[j] && lcs[i][j] == lcs[i + 1][j + 1] + 1) {
      rx_to_prog[i] = static_cast<int>(j);
      prog_to_rx[j] = static_cast<int>(i);
      ++i;
      ++j;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }

  std::vector<AlignedStep> extra;
  // Out-of-order exact matches.
  std::vector<bool> rx_used(n), prog_used(m);
  for (std::size_t i = 0; i < n; ++i) rx_used[i] = rx_to_prog[i] >= 0;
  for (std::size_t j = 0; j < m; ++j) prog_used[j] = prog_to_rx[j] >= 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (prog_used[j]) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (!rx_used[i] && a[i] == b[j]) {
        rx_used[i] = prog_used[j] = true;
        extra.push_back({StepVerdict::kReordered, static_cast<int>(i) + 1, static_cast<int>(j) + 1, 1.0, 0});
        break;
      }
    }
  }
  // Substitutions inside the same gap between anchored matches.
  auto gap_of_rx = [&](std::size_t i) {
    int k = -1;
    for (std::size_t x = 0; x < i; ++x) if (rx_to_prog[x] >= 0) k = rx_to_prog[x];
    return k;  // program index of the preceding anchor
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (rx_used[i]) continue;
    const int lo = gap_of_rx(i);
    int hi = static_cast<int>(m);
    for (std::size_t x = i + 1; x < n; ++x) {
      if (rx_to_prog[x] >= 0) {
        hi = rx_to_prog[x];
        break;
      }
    }
    int best = -1;
    double best_sim = 0;
    for (int j = lo + 1; j < hi; ++j) {
      if (prog_used[j]) continue;
      const double s = text::similarity(a[i], b[j]);
      if (s >= kSubstitutionSimilarity && s > best_sim) {
        best = j;
        best_sim = s;
      }
    }
    if (best >= 0) {
      rx_used[i] = prog_used[best] = true;
      extra.push_back({StepVerdict::kSubstituted, static_cast<int>(i) + 1, best + 1, best_sim,
                       static_cast<int>(text::levenshtein(a[i], b[best]))});
    }
  }

  FidelityReport r;
  for (std::size_t i = 0; i < n; ++i) {
    if (rx_to_prog[i] >= 0) {
      r.steps.push_back({StepVerdict::kMatch, static_cast<int>(i) + 1, rx_to_prog[i] + 1, 1.0, 0});
    } else if (!rx_used[i]) {
      r.steps.push_back({StepVerdict::kOmitted, static_cast<int>(i) + 1, std::nullopt, 0.0, 0});
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!prog_used[j]) {
      r.steps.push_back({StepVerdict::kExtraneous, std::nullopt, static_cast<int>(j) + 1, 0.0, 0});
    }
  }
  r.steps.insert(r.steps.end(), extra.begin(), extra.end());
  // Present in program order, Omitted entries after the program step they follow.
  auto key = [](const AlignedStep& s) {
    const double p = s.program_index ? *s.program_index : (s.rx_index ? *s.rx_index - 0.5 : 0);
    return std::pair<double, int>(p, s.rx_index.value_or(0));
  };
  std::stable_sort(r.steps.begin(), r.steps.end(),
                   [&](const AlignedStep& x, const AlignedStep& y) { return key(x) < key(y); });

  bool all_match = n == m;
  bool complete = true;
  for (const auto& s : r.steps) {
    if (s.verdict != StepVerdict::kMatch) all_match = false;
    if (s.verdict == StepVerdict::kOmitted || s.verdict == StepVerdict::kExtraneous) complete = false;
  }
  r.correct = all_match;
  r.complete = complete;
  return r;
}

FidelityReport validate_fidelity(const Prescription& rx, const dsl::InterventionProgram& p) {
  std::vector<std::string> a, b;
  for (const auto& s : rx.steps) a.push_back(s.text);
  for (const auto& s : p.steps) b.push_back(s.utterance);
  return validate_fidelity(a, b);
}

nlohmann::json fidelity_to_json(const FidelityReport& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.steps) {
    nlohmann::json e = {{"verdict", to_string(s.verdict)}};
    e["rx_index"] = s.rx_index ? nlohmann::json(*s.rx_index) : nlohmann::json(nullptr);
    e["program_index"] = s.program_index ? nlohmann::json(*s.program_index) : nlohmann::json(nullptr);
    if (s.verdict == StepVerdict::kSubstituted) {
      e["similarity"] = s.similarity;
      e["edit_distance"] = s.edit_distance;
    }
    steps.push_back(e);
  }
  return {{"correct", r.correct}, {"complete", r.complete}, {"steps", steps}};
}

}  // namespace rehab::genpipe
