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
#ifndef REHAB_SERVICE_SERVER_HPP_
#define REHAB_SERVICE_SERVER_HPP_

#include <memory>
#include <string>

namespace rehab::service {

struct ServiceConfig {
  std::string data_dir = "rehab-data";
  std::string host = "127.0.0.1";
  int port = 8080;                 // 0 picks a free port
  double default_rt_factor = 10;   // virtual seconds per wall second; <= 0 runs unpaced
  std::string prompt_dir;          // defaults to the shipped prompt components
  std::string replay_dir;
  std::string templates_dir;       // defaults to the shipped goal templates
  int threads = 16;

  /// DATA_DIR and PORT override the defaults.
  static ServiceConfig from_env();
};

/// HTTP service over the store, generator, validators, simulator and
/// evaluation. Endpoints:
///   GET  /health
///   POST /prescriptions, GET /prescriptions, GET /prescriptions/{id}
///   POST /prescriptions/{id}/generate   {"backend": "deterministic"|"replay"|"remote"}
///   POST /programs, GET /programs/{id}, POST /programs/{id}/validate
///   POST /scenarios, GET /scenarios, GET /scenarios/{id}
///   POST /sessions {"program_id", "scenario_id", "rt_factor"}
///   POST /sessions/{id}/start, GET /sessions/{id}
///   GET  /sessions/{id}/events          text/event-stream; ?from=<seq> or Last-Event-ID
///   GET  /sessions/{id}/report
///   POST /eval {"session_ids", "prelabels", "gamma"}
///   POST /retrofit {"prescription_id", "template_id"}
/// Errors are {"code", "message", "detail"}.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts serving on a background thread. Throws
  /// std::runtime_error when the port cannot be bound.
  void start();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  /// Stops accepting requests, finishes running sessions unpaced and joins.
  void stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rehab::service

#endif  // REHAB_SERVICE_SERVER_HPP_
