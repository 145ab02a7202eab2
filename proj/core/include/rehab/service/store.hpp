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
#ifndef REHAB_SERVICE_STORE_HPP_
#define REHAB_SERVICE_STORE_HPP_

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rehab::service {

enum class RecordKind { kPrescription, kProgram, kScenario, kSessionLog, kEvalReport, kVerdict };

const char* to_string(RecordKind k);
std::optional<RecordKind> record_kind_from_string(const std::string& s);
const std::vector<RecordKind>& all_record_kinds();

struct StoreRecord {
  RecordKind kind = RecordKind::kPrescription;
  std::string id;
  nlohmann::json payload;
  std::string created_at;
  std::string digest;  // sha256 of payload.dump()
};

std::string payload_digest(const nlohmann::json& payload);

/// Directory-per-kind store, one JSON file per record. Writes go to a
/// temporary file that is renamed into place, so a reader never sees a
/// partial record. Files that fail to parse or whose digest does not match
/// are moved to `quarantine/` and reported.
class Store {
 public:
  explicit Store(std::string root);

  StoreRecord put(RecordKind kind, nlohmann::json payload);
  /// Inserts or replaces the record with the given id.
  StoreRecord put(RecordKind kind, const std::string& id, nlohmann::json payload);
  std::optional<StoreRecord> get(RecordKind kind, const std::string& id);
  std::vector<std::string> list(RecordKind kind);
  std::map<std::string, std::size_t> counts();
  std::vector<std::string> quarantined();

  const std::string& root() const { return root_; }

 private:
  std::string path_for(RecordKind kind, const std::string& id) const;
  void scan();
  void quarantine(const std::string& path, const std::string& reason);

  std::string root_;
  std::mutex mu_;
  std::vector<std::string> quarantined_;
};

}  // namespace rehab::service

#endif  // REHAB_SERVICE_STORE_HPP_
