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
#ifndef REHAB_RUNTIME_LOG_CODEC_HPP_
#define REHAB_RUNTIME_LOG_CODEC_HPP_

#include <string>

#include <nlohmann/json.hpp>

#include "rehab/runtime/session.hpp"

namespace rehab::runtime {

nlohmann::json log_to_json(const SessionLog& log);
SessionLog log_from_json(const nlohmann::json& j);

/// One row per step: index,monitored,announced_at,detected_complete,
/// detection_at,advanced_at,timed_out,fallback_engaged,fallback_detected,
/// fallback_detection_at. Times in seconds.
std::string log_to_csv(const SessionLog& log);

nlohmann::json event_to_json(const SessionEvent& e);

}  // namespace rehab::runtime

#endif  // REHAB_RUNTIME_LOG_CODEC_HPP_
