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
#include "rehab/service/events.hpp"

#include <stdexcept>

#include "rehab/runtime/log_codec.hpp"

namespace rehab::service {

nlohmann::json stream_event_to_json(const StreamEvent& e) {
  auto j = runtime::event_to_json(e.event);
  j["session_id"] = e.session_id;
  j["seq"] = e.seq;
  return j;
}

std::string sse_frame(const StreamEvent& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + runtime::to_string(e.event.kind) +
         "\ndata: " + stream_event_to_json(e).dump() + "\n\n";
}

void EventHub::open(const std::string& session_id) {
  std::lock_guard<std::mutex> lock(mu_);
  channels_.try_emplace(session_id);
}

bool EventHub::has(const std::string& session_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return channels_.count(session_id) > 0;
}

StreamEvent EventHub::publish(const std::string& session_id, const runtime::SessionEvent& e) {
  StreamEvent out;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = channels_.find(session_id);
    if (it == channels_.end()) throw std::invalid_argument("unknown session " + session_id);
    if (it->second.closed) throw std::logic_error("session " + session_id + " already finished");
    out.session_id = session_id;
    out.seq = static_cast<std::int64_t>(it->second.events.size()) + 1;
    out.event = e;
    it->second.events.push_back(out);
    if (e.kind == runtime::EventKind::kSessionDone) it->second.closed = true;
  }
  cv_.notify_all();
  return out;
}

std::vector<StreamEvent> EventHub::read(const std::string& session_id, std::int64_t after_seq,
                                        std::chrono::milliseconds wait) const {
  std::unique_lock<std::mutex> lock(mu_);
  auto ready = [&] {
    if (shutdown_) return true;
    auto it = channels_.find(session_id);
    if (it == channels_.end()) return true;
    return static_cast<std::int64_t>(it->second.events.size()) > after_seq || it->second.closed;
  };
  cv_.wait_for(lock, wait, ready);
  auto it = channels_.find(session_id);
  if (it == channels_.end()) return {};
  const auto& ev = it->second.events;
  std::vector<StreamEvent> out;
  for (std::size_t i = static_cast<std::size_t>(std::max<std::int64_t>(after_seq, 0)); i < ev.size(); ++i) {
    out.push_back(ev[i]);
  }
  return out;
}

bool EventHub::closed(const std::string& session_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = channels_.find(session_id);
  return it != channels_.end() && it->second.closed;
}

std::int64_t EventHub::last_seq(const std::string& session_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = channels_.find(session_id);
  return it == channels_.end() ? 0 : static_cast<std::int64_t>(it->second.events.size());
}

void EventHub::shutdown() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    shutdown_ = true;
  }
  cv_.notify_all();
}

}  // namespace rehab::service
