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
#ifndef REHAB_GENPIPE_BACKEND_HPP_
#define REHAB_GENPIPE_BACKEND_HPP_

#include <memory>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "rehab/genpipe/prescription.hpp"
#include "rehab/genpipe/prompt.hpp"

namespace rehab::genpipe {

struct Provenance {
  std::string backend;
  std::string model;
  std::string timestamp;  // UTC, ISO 8601
  std::string prompt_digest;
  int attempts = 1;
};

nlohmann::json provenance_to_json(const Provenance& p);

/// Raw candidate text; not guaranteed to parse.
struct Generation {
  std::string text;
  Provenance provenance;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TranscriptMissing : public BackendError {
 public:
  TranscriptMissing(const std::string& what, std::string path)
      : BackendError(what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Transport failure after all retries; `attempts` and the last HTTP status
/// (0 when no response arrived) describe what was tried.
class TransportError : public BackendError {
 public:
  TransportError(const std::string& what, int attempts, int last_status)
      : BackendError(what), attempts_(attempts), last_status_(last_status) {}
  int attempts() const { return attempts_; }
  int last_status() const { return last_status_; }

 private:
  int attempts_;
  int last_status_;
};

class GenerationTimeout : public BackendError {
 public:
  using BackendError::BackendError;
};

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string id() const = 0;
  virtual Generation generate(const Prescription& rx, const PromptBundle& prompt) = 0;
};

/// Rule-based translator; ignores the prompt.
class DeterministicBackend : public GeneratorBackend {
 public:
  std::string id() const override { return "deterministic"; }
  Generation generate(const Prescription& rx, const PromptBundle& prompt) override;
};

/// Reads `<dir>/<prompt digest>.txt`.
class ReplayBackend : public GeneratorBackend {
 public:
  explicit ReplayBackend(std::string dir) : dir_(std::move(dir)) {}
  std::string id() const override { return "replay"; }
  Generation generate(const Prescription& rx, const PromptBundle& prompt) override;

  std::string transcript_path(const PromptBundle& prompt) const;

 private:
  std::string dir_;
};

struct RemoteConfig {
  std::string url;    // base URL; requests go to <url>/chat/completions
  std::string model;
  std::string key;
  double timeout_s = 120;
  int max_attempts = 3;
  int backoff_ms = 500;

  /// GENERATOR_URL, GENERATOR_MODEL, GENERATOR_KEY.
  static RemoteConfig from_env();
};

/// Chat-completions client. Retries on connection failure, 429 and 5xx.
class RemoteBackend : public GeneratorBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  std::string id() const override { return "remote"; }
  Generation generate(const Prescription& rx, const PromptBundle& prompt) override;

 private:
  RemoteConfig config_;
};

/// "deterministic", "replay" (needs `replay_dir`) or "remote" (from env).
std::unique_ptr<GeneratorBackend> make_backend(const std::string& name, const std::string& replay_dir);

/// Assembles the prompt and asks the backend for a candidate.
Generation generate_program(const Prescription& rx, GeneratorBackend& backend, const PromptConfig& config);

/// Removes a surrounding markdown code fence, if any.
std::string strip_code_fence(const std::string& text);

std::string utc_timestamp();

}  // namespace rehab::genpipe

#endif  // REHAB_GENPIPE_BACKEND_HPP_
