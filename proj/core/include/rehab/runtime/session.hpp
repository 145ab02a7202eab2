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
#ifndef REHAB_RUNTIME_SESSION_HPP_
#define REHAB_RUNTIME_SESSION_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rehab/common/time.hpp"
#include "rehab/dsl/ast.hpp"
#include "rehab/runtime/frame.hpp"

namespace rehab::runtime {

enum class StepState { kAnnounced, kMonitoring, kCompleted, kTimedOut, kFallbackMonitoring, kAdvanced };

const char* to_string(StepState s);
bool is_legal_transition(StepState from, StepState to);

/// Outcome of monitoring one expectation.
struct MonitorOutcome {
  Micros announced_at{0};
  bool detected_complete = false;
  std::optional<Micros> detection_at;
  bool timed_out = false;
  friend bool operator==(const MonitorOutcome&, const MonitorOutcome&) = default;
};

struct StepRecord {
  int index = 0;
  std::string utterance;
  bool monitored = false;
  Micros announced_at{0};
  bool detected_complete = false;
  std::optional<Micros> detection_at;
  Micros advanced_at{0};
  bool timed_out = false;
  bool fallback_engaged = false;
  std::optional<MonitorOutcome> fallback;

  /// Detection that caused the advance, primary or fallback.
  std::optional<Micros> advancing_detection() const;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct SessionLog {
  std::string program_id;
  std::uint64_t seed = 0;
  std::string clock_profile = "virtual";
  double poll_hz = 10;
  bool truncated = false;
  std::vector<StepRecord> steps;

  friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

enum class EventKind {
  kAnnounced,
  kDetectionTick,
  kCompleted,
  kTimedOut,
  kFallbackEngaged,
  kAdvanced,
  kSessionDone,
};

const char* to_string(EventKind k);

struct SessionEvent {
  EventKind kind = EventKind::kAnnounced;
  int step_index = 0;
  Micros t{0};
  bool fallback = false;
};

using EventSink = std::function<void(const SessionEvent&)>;

struct SessionConfig {
  double poll_hz = 10;
  Micros announce_dwell = std::chrono::seconds(5);
  std::string program_id;
  std::uint64_t seed = 0;
  std::string clock_profile = "virtual";
};

/// Thrown when the frame source ends before the program; carries the steps
/// that finished.
class TruncatedSession : public std::runtime_error {
 public:
  TruncatedSession(const std::string& what, SessionLog partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SessionLog& partial_log() const { return partial_; }

 private:
  SessionLog partial_;
};

/// Runs the program against `frames`, advancing `clock`. Throws
/// std::invalid_argument for a poll rate outside [1, 60], ChannelMissing when
/// a monitor references a channel the source never provides, and
/// TruncatedSession when the source is exhausted.
SessionLog run_session(const dsl::InterventionProgram& p, FrameSource& frames, VirtualClock& clock,
                       const SessionConfig& config, const EventSink& sink = {});

}  // namespace rehab::runtime

#endif  // REHAB_RUNTIME_SESSION_HPP_
