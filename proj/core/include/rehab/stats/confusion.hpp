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
#ifndef REHAB_STATS_CONFUSION_HPP_
#define REHAB_STATS_CONFUSION_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/runtime/session.hpp"

namespace rehab::stats {

enum class Expected { kShouldComplete, kShouldNotComplete };

const char* to_string(Expected e);
Expected expected_from_string(const std::string& s);

struct PreLabel {
  std::string session_id;
  int step_index = 0;
  Expected expected = Expected::kShouldComplete;
  friend bool operator==(const PreLabel&, const PreLabel&) = default;
};

/// Positive class is "complete".
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;

  std::int64_t n() const { return tp + fn + tn + fp; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// A label refers to a step that is not a logged monitored step, or a
/// monitored step has no label.
class PairingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// `session_ids[i]` names `logs[i]`; labels are paired with monitored steps by
/// (session id, step index).
ConfusionMatrix confusion(const std::vector<PreLabel>& labels,
                          const std::vector<std::string>& session_ids,
                          const std::vector<runtime::SessionLog>& logs);

/// Single-session form; every label's session id must be empty.
ConfusionMatrix confusion(const std::vector<PreLabel>& labels, const runtime::SessionLog& log);

nlohmann::json prelabel_to_json(const PreLabel& l);
PreLabel prelabel_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ConfusionMatrix& m);

}  // namespace rehab::stats

#endif  // REHAB_STATS_CONFUSION_HPP_
