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
#ifndef REHAB_SERVICE_EVENTS_HPP_
#define REHAB_SERVICE_EVENTS_HPP_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/runtime/session.hpp"

namespace rehab::service {

struct StreamEvent {
  std::string session_id;
  std::int64_t seq = 0;  // 1-based, gapless per session
  runtime::SessionEvent event;
};

nlohmann::json stream_event_to_json(const StreamEvent& e);

/// Server-push framing: "id: <seq>\nevent: <kind>\ndata: <json>\n\n".
std::string sse_frame(const StreamEvent& e);

/// Per-session event log with fan-out. Publishing never blocks on readers:
/// events are appended to the session backlog and waiting readers are woken.
class EventHub {
 public:
  /// Opens a channel; publishing to an unknown session throws.
  void open(const std::string& session_id);
  bool has(const std::string& session_id) const;

  /// Assigns the next sequence number. A SessionDone event closes the channel.
  StreamEvent publish(const std::string& session_id, const runtime::SessionEvent& e);

  /// Events with seq > after_seq, waiting up to `wait` for at least one.
  /// Returns an empty list on timeout.
  std::vector<StreamEvent> read(const std::string& session_id, std::int64_t after_seq,
                                std::chrono::milliseconds wait) const;

  bool closed(const std::string& session_id) const;
  std::int64_t last_seq(const std::string& session_id) const;

  /// Wakes every waiting reader (used at shutdown).
  void shutdown();

 private:
  struct Channel {
    std::vector<StreamEvent> events;
    bool closed = false;
  };
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::map<std::string, Channel> channels_;
  bool shutdown_ = false;
};

}  // namespace rehab::service

#endif  // REHAB_SERVICE_EVENTS_HPP_
