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
#include "rehab/genpipe/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "rehab/genpipe/template_generator.hpp"

namespace rehab::genpipe {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

Provenance provenance(const std::string& backend, const PromptBundle& prompt) {
  Provenance p;
  p.backend = backend;
  p.timestamp = utc_timestamp();
  p.prompt_digest = prompt.digest();
  return p;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json provenance_to_json(const Provenance& p) {
  return {{"backend", p.backend},
          {"model", p.model},
          {"timestamp", p.timestamp},
          {"prompt_digest", p.prompt_digest},
          {"attempts", p.attempts}};
}

std::string strip_code_fence(const std::string& text) {
  const auto open = text.find("```");
  if (open == std::string::npos) return text;
  const auto body = text.find('\n', open);
  if (body == std::string::npos) return text;
  const auto close = text.find("```", body + 1);
  return text.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
}

Generation DeterministicBackend::generate(const Prescription& rx, const PromptBundle& prompt) {
  return {generate_template_program(rx), provenance(id(), prompt)};
}

std::string ReplayBackend::transcript_path(const PromptBundle& prompt) const {
  return (std::filesystem::path(dir_) / (prompt.digest() + ".txt")).string();
}

Generation ReplayBackend::generate(const Prescription& rx, const PromptBundle& prompt) {
  const std::string path = transcript_path(prompt);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TranscriptMissing("no replay transcript for prescription '" + rx.id + "' (" + path + ")", path);
  }
  std::ostringstream s;
  s << in.rdbuf();
  return {strip_code_fence(s.str()), provenance(id(), prompt)};
}

RemoteConfig RemoteConfig::from_env() {
  RemoteConfig c;
  c.url = env_or("GENERATOR_URL", "");
  c.model = env_or("GENERATOR_MODEL", "");
  c.key = env_or("GENERATOR_KEY", "");
  return c;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) throw BackendError("remote backend needs GENERATOR_URL");
  if (config_.max_attempts < 1) config_.max_attempts = 1;
}

Generation RemoteBackend::generate(const Prescription& rx, const PromptBundle& prompt) {
  (void)rx;
  const auto scheme_end = config_.url.find("://");
  const auto path_start = config_.url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = config_.url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : config_.url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  const auto secs = static_cast<time_t>(config_.timeout_s);
  client.set_connection_timeout(std::min<time_t>(secs, 10), 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!config_.key.empty()) headers.emplace("Authorization", "Bearer " + config_.key);

  const nlohmann::json body = {
      {"model", config_.model},
      {"temperature", 0},
      {"messages",
       {{{"role", "system"}, {"content", prompt.system_text()}},
        {{"role", "user"}, {"content", prompt.prescription_payload}}}}};

  int last_status = 0;
  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms * (1 << (attempt - 2))));
    }
    auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
      if (res.error() == httplib::Error::Read && attempt == config_.max_attempts) {
        throw GenerationTimeout("generator did not answer within " + std::to_string(config_.timeout_s) + " s");
      }
      continue;
    }
    last_status = res->status;
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("generator returned HTTP " + std::to_string(res->status) + ": " + res->body,
                           attempt, res->status);
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      Generation g;
      g.text = strip_code_fence(j.at("choices").at(0).at("message").at("content").get<std::string>());
      g.provenance = provenance(id(), prompt);
      g.provenance.model = config_.model;
      g.provenance.attempts = attempt;
      return g;
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed generator response: ") + e.what(), attempt, res->status);
    }
  }
  throw TransportError("generator unreachable at " + config_.url + " after " +
                           std::to_string(config_.max_attempts) + " attempts (" + last_error + ")",
                       config_.max_attempts, last_status);
}

std::unique_ptr<GeneratorBackend> make_backend(const std::string& name, const std::string& replay_dir) {
  if (name == "deterministic") return std::make_unique<DeterministicBackend>();
  if (name == "replay") return std::make_unique<ReplayBackend>(replay_dir);
  if (name == "remote") return std::make_unique<RemoteBackend>(RemoteConfig::from_env());
  throw std::invalid_argument("unknown generator backend '" + name + "'");
}

Generation generate_program(const Prescription& rx, GeneratorBackend& backend, const PromptConfig& config) {
  return backend.generate(rx, assemble_prompt(rx, config));
}

}  // namespace rehab::genpipe
