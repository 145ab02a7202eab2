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
#include "rehab/stats/confusion.hpp"

#include <map>
#include <set>
#include <utility>

namespace rehab::stats {

const char* to_string(Expected e) {
  return e == Expected::kShouldComplete ? "should_complete" : "should_not_complete";
}

Expected expected_from_string(const std::string& s) {
  if (s == "should_complete") return Expected::kShouldComplete;
  if (s == "should_not_complete") return Expected::kShouldNotComplete;
  throw std::invalid_argument("unknown pre-label '" + s + "'");
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fn += o.fn;
  tn += o.tn;
  fp += o.fp;
  return *this;
}

ConfusionMatrix confusion(const std::vector<PreLabel>& labels,
                          const std::vector<std::string>& session_ids,
                          const std::vector<runtime::SessionLog>& logs) {
  if (session_ids.size() != logs.size()) {
    throw std::invalid_argument("session id list does not match log list");
  }
  std::map<std::pair<std::string, int>, const runtime::StepRecord*> steps;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    for (const auto& s : logs[i].steps) {
      if (s.monitored) steps[{session_ids[i], s.index}] = &s;
    }
  }
  ConfusionMatrix m;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& l : labels) {
    const std::pair<std::string, int> key{l.session_id, l.step_index};
    auto it = steps.find(key);
    if (it == steps.end()) {
      throw PairingError("label for session '" + l.session_id + "' step " +
                         std::to_string(l.step_index) + " has no monitored step in the logs");
    }
    if (!seen.insert(key).second) {
      throw PairingError("duplicate label for session '" + l.session_id + "' step " +
                         std::to_string(l.step_index));
    }
    const bool detected = it->second->detected_complete;
    if (l.expected == Expected::kShouldComplete) {
      ++(detected ? m.tp : m.fn);
    } else {
      ++(detected ? m.fp : m.tn);
    }
  }
  for (const auto& [key, rec] : steps) {
    if (!seen.count(key)) {
      throw PairingError("monitored step " + std::to_string(key.second) + " of session '" +
                         key.first + "' has no label");
    }
  }
  return m;
}

ConfusionMatrix confusion(const std::vector<PreLabel>& labels, const runtime::SessionLog& log) {
  return confusion(labels, {std::string()}, {log});
}

nlohmann::json prelabel_to_json(const PreLabel& l) {
  return {{"session_id", l.session_id}, {"step", l.step_index}, {"expected", to_string(l.expected)}};
}

PreLabel prelabel_from_json(const nlohmann::json& j) {
  PreLabel l;
  l.session_id = j.value("session_id", std::string());
  l.step_index = j.at("step").get<int>();
  l.expected = expected_from_string(j.at("expected").get<std::string>());
  return l;
}

nlohmann::json matrix_to_json(const ConfusionMatrix& m) {
  return {{"tp", m.tp}, {"fn", m.fn}, {"tn", m.tn}, {"fp", m.fp}};
}

}  // namespace rehab::stats
