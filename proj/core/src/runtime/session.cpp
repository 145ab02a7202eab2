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
#include "rehab/runtime/session.hpp"

#include <cmath>

#include "rehab/runtime/predicate.hpp"

namespace rehab::runtime {

using namespace rehab::dsl;

const char* to_string(StepState s) {
  switch (s) {
    case StepState::kAnnounced: return "Announced";
    case StepState::kMonitoring: return "Monitoring";
    case StepState::kCompleted: return "Completed";
    case StepState::kTimedOut: return "TimedOut";
    case StepState::kFallbackMonitoring: return "FallbackMonitoring";
    case StepState::kAdvanced: return "Advanced";
  }
  return "?";
}

bool is_legal_transition(StepState from, StepState to) {
  switch (from) {
    case StepState::kAnnounced:
      return to == StepState::kMonitoring || to == StepState::kAdvanced;
    case StepState::kMonitoring:
      return to == StepState::kCompleted || to == StepState::kTimedOut;
    case StepState::kTimedOut:
      return to == StepState::kFallbackMonitoring || to == StepState::kAdvanced;
    case StepState::kFallbackMonitoring:
      return to == StepState::kCompleted || to == StepState::kTimedOut;
    case StepState::kCompleted:
      return to == StepState::kAdvanced;
    case StepState::kAdvanced:
      return false;
  }
  return false;
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::kAnnounced: return "Announced";
    case EventKind::kDetectionTick: return "DetectionTick";
    case EventKind::kCompleted: return "Completed";
    case EventKind::kTimedOut: return "TimedOut";
    case EventKind::kFallbackEngaged: return "FallbackEngaged";
    case EventKind::kAdvanced: return "Advanced";
    case EventKind::kSessionDone: return "SessionDone";
  }
  return "?";
}

std::optional<Micros> StepRecord::advancing_detection() const {
  if (detected_complete) return detection_at;
  if (fallback && fallback->detected_complete) return fallback->detection_at;
  return std::nullopt;
}

namespace {

class Runner {
 public:
  Runner(const InterventionProgram& p, FrameSource& frames, VirtualClock& clock,
         const SessionConfig& cfg, const EventSink& sink)
      : p_(p), frames_(frames), clock_(clock), cfg_(cfg), sink_(sink) {
    log_.program_id = cfg.program_id;
    log_.seed = cfg.seed;
    log_.clock_profile = cfg.clock_profile;
    log_.poll_hz = cfg.poll_hz;
  }

  SessionLog run() {
    for (const auto& step : p_.steps) run_step(step);
    emit(EventKind::kSessionDone, p_.steps.empty() ? 0 : p_.steps.back().index, clock_.now());
    return std::move(log_);
  }

 private:
  void emit(EventKind k, int step, Micros t, bool fallback = false) {
    if (sink_) sink_(SessionEvent{k, step, t, fallback});
  }

  void transition(StepState to) {
    if (!is_legal_transition(state_, to)) {
      throw std::logic_error(std::string("illegal step transition ") + to_string(state_) + " -> " +
                             to_string(to));
    }
    state_ = to;
  }

  void pull(Micros t) {
    if (!frames_.pull_until(t, buffer_)) {
      log_.truncated = true;
      throw TruncatedSession("frame source exhausted at t=" + std::to_string(to_seconds(t)) + "s",
                             log_);
    }
    clock_.advance_to(t);
  }

  // Drops buffered frames older than the latest one at or before `t`, so
  // the next window starts at the announcement.
  void start_window(Micros t) {
    std::size_t keep = 0;
    while (keep < buffer_.size() && buffer_[keep].timestamp < t) ++keep;
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(keep));
  }

  MonitorOutcome monitor(const Step& step, const Expectation& e, bool fallback) {
    MonitorOutcome out;
    const Micros start = clock_.now();
    out.announced_at = start;
    start_window(start);
    const EvalContext ctx = make_context(p_, start, cfg_.poll_hz);
    const Micros deadline = start + from_seconds(e.timeout_s);
    long last_tick = 0;
    for (long k = 1;; ++k) {
      Micros poll = ctx.polls.instant(k);
      if (poll > deadline) poll = deadline;
      pull(poll);
      if (eval_predicate(e.predicate, buffer_, poll, ctx)) {
        out.detected_complete = true;
        out.detection_at = poll;
        return out;
      }
      const long tick = static_cast<long>((poll - start) / std::chrono::seconds(1));
      if (tick > last_tick) {
        last_tick = tick;
        emit(EventKind::kDetectionTick, step.index, poll, fallback);
      }
      if (poll == deadline) break;
    }
    out.timed_out = true;
    return out;
  }

  void run_step(const Step& step) {
    StepRecord rec;
    rec.index = step.index;
    rec.utterance = step.utterance;
    rec.monitored = step.monitored();
    rec.announced_at = clock_.now();
    state_ = StepState::kAnnounced;
    frames_.on_announce(Announcement{step.index, false, rec.announced_at, &step,
                                     step.expect ? &*step.expect : nullptr});
    emit(EventKind::kAnnounced, step.index, rec.announced_at);

    if (!step.expect) {
      pull(rec.announced_at + cfg_.announce_dwell);
      transition(StepState::kAdvanced);
      rec.advanced_at = clock_.now();
      finish(std::move(rec));
      return;
    }

    transition(StepState::kMonitoring);
    const MonitorOutcome primary = monitor(step, *step.expect, false);
    rec.detected_complete = primary.detected_complete;
    rec.detection_at = primary.detection_at;
    rec.timed_out = primary.timed_out;
    if (primary.detected_complete) {
      transition(StepState::kCompleted);
      emit(EventKind::kCompleted, step.index, *primary.detection_at);
    } else {
      transition(StepState::kTimedOut);
      emit(EventKind::kTimedOut, step.index, clock_.now());
      if (step.fallback) {
        transition(StepState::kFallbackMonitoring);
        rec.fallback_engaged = true;
        const Micros at = clock_.now();
        frames_.on_announce(Announcement{step.index, true, at, &step, &step.fallback->expect});
        emit(EventKind::kFallbackEngaged, step.index, at, true);
        MonitorOutcome fb = monitor(step, step.fallback->expect, true);
        if (fb.detected_complete) {
          transition(StepState::kCompleted);
          emit(EventKind::kCompleted, step.index, *fb.detection_at, true);
        } else {
          transition(StepState::kTimedOut);
          emit(EventKind::kTimedOut, step.index, clock_.now(), true);
        }
        rec.fallback = fb;
      }
    }
    transition(StepState::kAdvanced);
    rec.advanced_at = clock_.now();
    finish(std::move(rec));
  }

  void finish(StepRecord rec) {
    emit(EventKind::kAdvanced, rec.index, rec.advanced_at);
    log_.steps.push_back(std::move(rec));
  }

  const InterventionProgram& p_;
  FrameSource& frames_;
  VirtualClock& clock_;
  const SessionConfig& cfg_;
  const EventSink& sink_;
  SessionLog log_;
  std::vector<PoseFrame> buffer_;
  StepState state_ = StepState::kAnnounced;
};

}  // namespace

SessionLog run_session(const InterventionProgram& p, FrameSource& frames, VirtualClock& clock,
                       const SessionConfig& config, const EventSink& sink) {
  if (!(config.poll_hz >= 1 && config.poll_hz <= 60)) {
    throw std::invalid_argument("poll_hz must lie in [1, 60]");
  }
  return Runner(p, frames, clock, config, sink).run();
}

}  // namespace rehab::runtime
