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
#include "rehab/service/store.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rehab/common/digest.hpp"
#include "rehab/genpipe/backend.hpp"
#include "rehab/service/ulid.hpp"

namespace rehab::service {

namespace fs = std::filesystem;

const std::vector<RecordKind>& all_record_kinds() {
  static const std::vector<RecordKind> kKinds = {RecordKind::kPrescription, RecordKind::kProgram,
                                                 RecordKind::kScenario,     RecordKind::kSessionLog,
                                                 RecordKind::kEvalReport,   RecordKind::kVerdict};
  return kKinds;
}

const char* to_string(RecordKind k) {
  switch (k) {
    case RecordKind::kPrescription: return "prescription";
    case RecordKind::kProgram: return "program";
    case RecordKind::kScenario: return "scenario";
    case RecordKind::kSessionLog: return "session_log";
    case RecordKind::kEvalReport: return "eval_report";
    case RecordKind::kVerdict: return "verdict";
  }
  return "?";
}

std::optional<RecordKind> record_kind_from_string(const std::string& s) {
  for (auto k : all_record_kinds()) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string payload_digest(const nlohmann::json& payload) { return sha256_hex(payload.dump()); }

namespace {

bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }) && id.front() != '.';
}

std::optional<StoreRecord> read_record(const fs::path& p, std::string* why) {
  std::ifstream in(p);
  if (!in) {
    *why = "unreadable";
    return std::nullopt;
  }
  try {
    const auto j = nlohmann::json::parse(in);
    StoreRecord r;
    const auto kind = record_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) {
      *why = "unknown kind";
      return std::nullopt;
    }
    r.kind = *kind;
    r.id = j.at("id").get<std::string>();
    r.created_at = j.at("created_at").get<std::string>();
    r.digest = j.at("digest").get<std::string>();
    r.payload = j.at("payload");
    if (payload_digest(r.payload) != r.digest) {
      *why = "digest mismatch";
      return std::nullopt;
    }
    return r;
  } catch (const std::exception& e) {
    *why = std::string("corrupt: ") + e.what();
    return std::nullopt;
  }
}

}  // namespace

Store::Store(std::string root) : root_(std::move(root)) {
  for (auto k : all_record_kinds()) fs::create_directories(fs::path(root_) / to_string(k));
  fs::create_directories(fs::path(root_) / "quarantine");
  scan();
}

std::string Store::path_for(RecordKind kind, const std::string& id) const {
  return (fs::path(root_) / to_string(kind) / (id + ".json")).string();
}

void Store::quarantine(const std::string& path, const std::string& reason) {
  const fs::path src(path);
  const fs::path dst = fs::path(root_) / "quarantine" / (src.parent_path().filename().string() + "__" +
                                                        src.filename().string());
  std::error_code ec;
  fs::rename(src, dst, ec);
  quarantined_.push_back(src.parent_path().filename().string() + "/" + src.filename().string() + ": " + reason);
}

void Store::scan() {
  for (auto k : all_record_kinds()) {
    for (const auto& entry : fs::directory_iterator(fs::path(root_) / to_string(k))) {
      const auto name = entry.path().filename().string();
      if (name.find(".tmp") != std::string::npos) {
        // Interrupted write; the record was never published.
        fs::remove(entry.path());
        continue;
      }
      std::string why;
      if (!read_record(entry.path(), &why)) quarantine(entry.path().string(), why);
    }
  }
}

StoreRecord Store::put(RecordKind kind, nlohmann::json payload) { return put(kind, new_ulid(), std::move(payload)); }

StoreRecord Store::put(RecordKind kind, const std::string& id, nlohmann::json payload) {
  if (!safe_id(id)) throw std::invalid_argument("invalid record id '" + id + "'");
  StoreRecord r;
  r.kind = kind;
  r.id = id;
  r.payload = std::move(payload);
  r.digest = payload_digest(r.payload);
  r.created_at = genpipe::utc_timestamp();
  const nlohmann::json doc = {{"kind", to_string(kind)},
                              {"id", r.id},
                              {"created_at", r.created_at},
                              {"digest", r.digest},
                              {"payload", r.payload}};
  std::lock_guard<std::mutex> lock(mu_);
  const std::string final_path = path_for(kind, id);
  const std::string tmp = final_path + ".tmp-" + new_ulid();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << doc.dump() << "\n";
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  fs::rename(tmp, final_path);
  return r;
}

std::optional<StoreRecord> Store::get(RecordKind kind, const std::string& id) {
  if (!safe_id(id)) return std::nullopt;
  std::lock_guard<std::mutex> lock(mu_);
  const std::string p = path_for(kind, id);
  if (!fs::exists(p)) return std::nullopt;
  std::string why;
  auto r = read_record(p, &why);
  if (!r) {
    quarantine(p, why);
    return std::nullopt;
  }
  return r;
}

std::vector<std::string> Store::list(RecordKind kind) {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(fs::path(root_) / to_string(kind))) {
    const auto name = entry.path().filename().string();
    if (name.size() > 5 && name.ends_with(".json")) out.push_back(name.substr(0, name.size() - 5));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, std::size_t> Store::counts() {
  std::map<std::string, std::size_t> out;
  for (auto k : all_record_kinds()) out[to_string(k)] = list(k).size();
  return out;
}

std::vector<std::string> Store::quarantined() {
  std::lock_guard<std::mutex> lock(mu_);
  return quarantined_;
}

}  // namespace rehab::service
