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
#include "rehab/runtime/log_codec.hpp"

#include <sstream>

#include "rehab/dsl/printer.hpp"

namespace rehab::runtime {

using nlohmann::json;

namespace {

json time_or_null(const std::optional<Micros>& t) {
  return t ? json(to_seconds(*t)) : json(nullptr);
}

std::optional<Micros> time_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return from_seconds(j.get<double>());
}

json outcome_to_json(const MonitorOutcome& o) {
  return {{"announced_at", to_seconds(o.announced_at)},
          {"detected_complete", o.detected_complete},
          {"detection_at", time_or_null(o.detection_at)},
          {"timed_out", o.timed_out}};
}

MonitorOutcome outcome_from_json(const json& j) {
  MonitorOutcome o;
  o.announced_at = from_seconds(j.at("announced_at").get<double>());
  o.detected_complete = j.at("detected_complete").get<bool>();
  o.detection_at = time_from(j.at("detection_at"));
  o.timed_out = j.at("timed_out").get<bool>();
  return o;
}

std::string csv_time(const std::optional<Micros>& t) {
  return t ? dsl::format_number(to_seconds(*t)) : std::string();
}

}  // namespace

json log_to_json(const SessionLog& log) {
  json steps = json::array();
  for (const auto& s : log.steps) {
    json e = {{"index", s.index},
              {"utterance", s.utterance},
              {"monitored", s.monitored},
              {"announced_at", to_seconds(s.announced_at)},
              {"detected_complete", s.detected_complete},
              {"detection_at", time_or_null(s.detection_at)},
              {"advanced_at", to_seconds(s.advanced_at)},
              {"timed_out", s.timed_out},
              {"fallback_engaged", s.fallback_engaged},
              {"fallback", s.fallback ? outcome_to_json(*s.fallback) : json(nullptr)}};
    steps.push_back(std::move(e));
  }
  return {{"program_id", log.program_id}, {"seed", log.seed},
          {"clock_profile", log.clock_profile}, {"poll_hz", log.poll_hz},
          {"truncated", log.truncated}, {"steps", steps}};
}

SessionLog log_from_json(const json& j) {
  SessionLog log;
  log.program_id = j.at("program_id").get<std::string>();
  log.seed = j.at("seed").get<std::uint64_t>();
  log.clock_profile = j.at("clock_profile").get<std::string>();
  log.poll_hz = j.at("poll_hz").get<double>();
  log.truncated = j.value("truncated", false);
  for (const auto& e : j.at("steps")) {
    StepRecord s;
    s.index = e.at("index").get<int>();
    s.utterance = e.at("utterance").get<std::string>();
    s.monitored = e.at("monitored").get<bool>();
    s.announced_at = from_seconds(e.at("announced_at").get<double>());
    s.detected_complete = e.at("detected_complete").get<bool>();
    s.detection_at = time_from(e.at("detection_at"));
    s.advanced_at = from_seconds(e.at("advanced_at").get<double>());
    s.timed_out = e.at("timed_out").get<bool>();
    s.fallback_engaged = e.at("fallback_engaged").get<bool>();
    if (!e.at("fallback").is_null()) s.fallback = outcome_from_json(e.at("fallback"));
    log.steps.push_back(std::move(s));
  }
  return log;
}

std::string log_to_csv(const SessionLog& log) {
  std::ostringstream os;
  os << "index,monitored,announced_at,detected_complete,detection_at,advanced_at,timed_out,"
        "fallback_engaged,fallback_detected,fallback_detection_at\n";
  for (const auto& s : log.steps) {
    os << s.index << ',' << (s.monitored ? 1 : 0) << ','
       << dsl::format_number(to_seconds(s.announced_at)) << ',' << (s.detected_complete ? 1 : 0)
       << ',' << csv_time(s.detection_at) << ',' << dsl::format_number(to_seconds(s.advanced_at))
       << ',' << (s.timed_out ? 1 : 0) << ',' << (s.fallback_engaged ? 1 : 0) << ','
       << (s.fallback && s.fallback->detected_complete ? 1 : 0) << ','
       << csv_time(s.fallback ? s.fallback->detection_at : std::nullopt) << '\n';
  }
  return os.str();
}

json event_to_json(const SessionEvent& e) {
  return {{"kind", to_string(e.kind)},
          {"step", e.step_index},
          {"t", to_seconds(e.t)},
          {"fallback", e.fallback}};
}

}  // namespace rehab::runtime
