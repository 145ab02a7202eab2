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
#include "rehab/service/server.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "rehab/dsl/parser.hpp"
#include "rehab/dsl/semantics.hpp"
#include "rehab/genpipe/backend.hpp"
#include "rehab/genpipe/fidelity.hpp"
#include "rehab/genpipe/hallucination.hpp"
#include "rehab/genpipe/prompt.hpp"
#include "rehab/retrofit/retrofit.hpp"
#include "rehab/retrofit/template.hpp"
#include "rehab/runtime/log_codec.hpp"
#include "rehab/runtime/pacing.hpp"
#include "rehab/service/events.hpp"
#include "rehab/service/store.hpp"
#include "rehab/service/ulid.hpp"
#include "rehab/sim/scenario.hpp"
#include "rehab/sim/simulator.hpp"
#include "rehab/stats/confusion.hpp"
#include "rehab/stats/report.hpp"

#ifndef REHAB_DEFAULT_DATA_DIR
#define REHAB_DEFAULT_DATA_DIR "data"
#endif

namespace rehab::service {

namespace fs = std::filesystem;
using nlohmann::json;

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (const char* d = std::getenv("DATA_DIR"); d && *d) c.data_dir = d;
  if (const char* p = std::getenv("PORT"); p && *p) c.port = std::atoi(p);
  return c;
}

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
  json detail = json::object();
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const HttpError& e) {
  send_json(res, e.status, {{"code", e.code}, {"message", e.message}, {"detail", e.detail}});
}

json parse_body(const httplib::Request& req) {
  try {
    return req.body.empty() ? json::object() : json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw HttpError{400, "bad_json", "request body is not valid JSON", {{"error", e.what()}}};
  }
}

json record_json(const StoreRecord& r) {
  return {{"id", r.id}, {"kind", to_string(r.kind)}, {"created_at", r.created_at},
          {"digest", r.digest}, {"payload", r.payload}};
}

json diagnostics_json(const std::vector<dsl::Diagnostic>& ds) {
  json out = json::array();
  for (const auto& d : ds) {
    json j = {{"rule", d.rule}, {"message", d.message}, {"line", d.loc().line}, {"column", d.loc().column}};
    if (d.step_index) j["step"] = *d.step_index;
    out.push_back(std::move(j));
  }
  return out;
}

json truth_json(const runtime::GroundTruthTimes& t) {
  json out = json::array();
  for (const auto& x : t) out.push_back(x ? json(to_seconds(*x)) : json(nullptr));
  return out;
}

runtime::GroundTruthTimes truth_from_json(const json& j) {
  runtime::GroundTruthTimes out;
  for (const auto& x : j) {
    out.push_back(x.is_null() ? std::nullopt : std::optional<Micros>(from_seconds(x.get<double>())));
  }
  return out;
}

}  // namespace

struct Service::Impl {
  enum class RunState { kCreated, kRunning, kDone, kFailed };

  struct Run {
    std::string id;
    std::string program_id;
    std::string scenario_id;
    double rt_factor = 10;
    RunState state = RunState::kCreated;
    std::string error;
    dsl::InterventionProgram program;
    sim::Scenario scenario;
    std::thread worker;
  };

  ServiceConfig config;
  Store store;
  EventHub hub;
  httplib::Server server;
  std::thread listener;
  std::atomic<bool> stopping{false};
  std::mutex runs_mu;
  std::map<std::string, std::unique_ptr<Run>> runs;
  int bound_port = 0;

  explicit Impl(ServiceConfig c) : config(std::move(c)), store(config.data_dir) {
    if (config.prompt_dir.empty()) config.prompt_dir = std::string(REHAB_DEFAULT_DATA_DIR) + "/prompt";
    if (config.templates_dir.empty()) config.templates_dir = std::string(REHAB_DEFAULT_DATA_DIR) + "/templates";
    if (config.replay_dir.empty()) config.replay_dir = std::string(REHAB_DEFAULT_DATA_DIR) + "/replays";
    server.new_task_queue = [n = config.threads] { return new httplib::ThreadPool(static_cast<std::size_t>(n)); };
    routes();
  }

  StoreRecord need(RecordKind kind, const std::string& id) {
    auto r = store.get(kind, id);
    if (!r) throw HttpError{404, "not_found", std::string(to_string(kind)) + " '" + id + "' not found"};
    return *r;
  }

  // Wraps a handler so HttpError and library exceptions become JSON errors.
  template <typename F>
  httplib::Server::Handler wrap(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_error(res, e);
      } catch (const genpipe::PrescriptionError& e) {
        send_error(res, {422, "invalid_prescription", e.what()});
      } catch (const genpipe::TranscriptMissing& e) {
        send_error(res, {404, "transcript_missing", e.what(), {{"path", e.path()}}});
      } catch (const genpipe::TransportError& e) {
        send_error(res, {502, "transport_error", e.what(),
                         {{"attempts", e.attempts()}, {"last_status", e.last_status()}}});
      } catch (const genpipe::BackendError& e) {
        send_error(res, {502, "backend_error", e.what()});
      } catch (const json::exception& e) {
        send_error(res, {400, "bad_request", e.what()});
      } catch (const std::invalid_argument& e) {
        send_error(res, {400, "bad_request", e.what()});
      } catch (const std::exception& e) {
        send_error(res, {500, "internal", e.what()});
      }
    };
  }

  dsl::InterventionProgram parse_stored_program(const StoreRecord& r) {
    const auto src = r.payload.at("source").get<std::string>();
    auto pr = dsl::parse_program(src);
    if (!pr.ok()) {
      throw HttpError{422, "invalid_program", "program '" + r.id + "' does not validate",
                      {{"diagnostics", diagnostics_json(pr.diagnostics)}}};
    }
    return *pr.program;
  }

  json validate_program(const StoreRecord& prog) {
    const auto src = prog.payload.at("source").get<std::string>();
    auto pr = dsl::parse_program(src);
    json out = {{"program_id", prog.id}, {"parsed", pr.ok()}, {"diagnostics", diagnostics_json(pr.diagnostics)}};
    bool ok = pr.ok();
    if (pr.ok() && prog.payload.contains("prescription_id")) {
      const auto rxr = need(RecordKind::kPrescription, prog.payload.at("prescription_id").get<std::string>());
      const auto rx = genpipe::prescription_from_json(rxr.payload);
      const auto fid = genpipe::validate_fidelity(rx, *pr.program);
      const auto findings = genpipe::detect_hallucinated_monitors(rx, *pr.program);
      json fj = json::array();
      for (const auto& f : findings) fj.push_back(genpipe::finding_to_json(f));
      out["fidelity"] = genpipe::fidelity_to_json(fid);
      out["hallucinations"] = fj;
      ok = ok && fid.correct && fid.complete && findings.empty();
    }
    out["ok"] = ok;
    return out;
  }

  void run_session_thread(Run* run) {
    const std::string sid = run->id;
    try {
      const auto wall0 = std::chrono::steady_clock::now();
      const double rt = run->rt_factor;
      VirtualClock clock([this, wall0, rt](Micros, Micros to) {
        if (rt <= 0 || stopping.load()) return;
        const auto due = wall0 + std::chrono::microseconds(static_cast<std::int64_t>(
                                     static_cast<double>(to.count()) / rt));
        while (!stopping.load() && std::chrono::steady_clock::now() < due) {
          std::this_thread::sleep_until(std::min(due, std::chrono::steady_clock::now() + std::chrono::milliseconds(50)));
        }
      });
      sim::SimOptions opts;
      opts.hz = run->scenario.hz;
      sim::SimulatedPatient patient(run->program, run->scenario.profile, run->scenario.script,
                                    run->scenario.noise, opts);
      runtime::SessionConfig cfg;
      cfg.program_id = run->program_id;
      cfg.seed = run->scenario.seed;
      cfg.clock_profile = rt > 0 ? "virtual x" + std::to_string(rt) : "virtual";
      json events = json::array();
      // SessionDone goes out only after the log is stored, so a client that
      // sees it can fetch the report.
      std::optional<runtime::SessionEvent> done;
      auto log = runtime::run_session(run->program, patient, clock, cfg, [&](const runtime::SessionEvent& e) {
        if (e.kind == runtime::EventKind::kSessionDone) {
          done = e;
          events.push_back(stream_event_to_json({sid, hub.last_seq(sid) + 1, e}));
        } else {
          events.push_back(stream_event_to_json(hub.publish(sid, e)));
        }
      });
      const auto truth = patient.truth_for(log);
      store.put(RecordKind::kSessionLog, sid,
                {{"session_id", sid},
                 {"program_id", run->program_id},
                 {"scenario_id", run->scenario_id},
                 {"log", runtime::log_to_json(log)},
                 {"truth", truth_json(truth)},
                 {"events", events}});
      {
        std::lock_guard<std::mutex> lock(runs_mu);
        run->state = RunState::kDone;
      }
      if (done) hub.publish(sid, *done);
    } catch (const std::exception& e) {
      {
        std::lock_guard<std::mutex> lock(runs_mu);
        run->state = RunState::kFailed;
        run->error = e.what();
      }
      if (!hub.closed(sid)) {
        runtime::SessionEvent done;
        done.kind = runtime::EventKind::kSessionDone;
        hub.publish(sid, done);
      }
    }
  }

  static const char* state_name(RunState s) {
    switch (s) {
      case RunState::kCreated: return "created";
      case RunState::kRunning: return "running";
      case RunState::kDone: return "done";
      case RunState::kFailed: return "failed";
    }
    return "?";
  }

  json session_report(const std::string& id) {
    const auto rec = need(RecordKind::kSessionLog, id);
    const auto log = runtime::log_from_json(rec.payload.at("log"));
    const auto truth = truth_from_json(rec.payload.at("truth"));
    const auto verdicts = runtime::pacing_of(log, truth);
    json pacing = json::array();
    for (auto v : verdicts) pacing.push_back(runtime::to_string(v));
    std::vector<runtime::PacingVerdict> monitored;
    int completed = 0, timed_out = 0;
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
      if (!log.steps[i].monitored) continue;
      monitored.push_back(verdicts[i]);
      completed += log.steps[i].detected_complete;
      timed_out += log.steps[i].timed_out;
    }
    const auto ps = stats::summarize_pacing(monitored);
    return {{"session_id", id},
            {"program_id", rec.payload.value("program_id", "")},
            {"scenario_id", rec.payload.value("scenario_id", "")},
            {"log", rec.payload.at("log")},
            {"truth", rec.payload.at("truth")},
            {"pacing", pacing},
            {"summary",
             {{"steps", log.steps.size()},
              {"monitored", monitored.size()},
              {"detected_complete", completed},
              {"timed_out", timed_out},
              {"adequate", ps.adequate},
              {"premature", ps.premature},
              {"delayed", ps.delayed}}}};
  }

  void routes() {
    auto& s = server;

    s.Get("/health", wrap([this](const httplib::Request&, httplib::Response& res) {
      json counts = json::object();
      for (const auto& [k, n] : store.counts()) counts[k] = n;
      const auto q = store.quarantined();
      std::size_t active = 0;
      {
        std::lock_guard<std::mutex> lock(runs_mu);
        for (const auto& [id, r] : runs) active += r->state == RunState::kRunning;
      }
      send_json(res, 200, {{"status", q.empty() ? "ok" : "degraded"},
                           {"counts", counts},
                           {"quarantined", q},
                           {"active_sessions", active}});
    }));

    // ---- prescriptions ----
    s.Post("/prescriptions", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto body = parse_body(req);
      auto rx = genpipe::prescription_from_json(body);
      genpipe::validate_prescription(rx);
      const auto r = store.put(RecordKind::kPrescription, body);
      send_json(res, 201, record_json(r));
    }));
    s.Get("/prescriptions", wrap([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"ids", store.list(RecordKind::kPrescription)}});
    }));
    s.Get(R"(/prescriptions/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, record_json(need(RecordKind::kPrescription, req.matches[1])));
    }));
    s.Post(R"(/prescriptions/([^/]+)/generate)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto rxr = need(RecordKind::kPrescription, req.matches[1]);
      const auto rx = genpipe::prescription_from_json(rxr.payload);
      const auto backend_name = body.value("backend", std::string("deterministic"));
      if (backend_name != "deterministic" && backend_name != "replay" && backend_name != "remote") {
        throw HttpError{400, "bad_backend", "unknown backend '" + backend_name + "'"};
      }
      auto backend = genpipe::make_backend(backend_name, body.value("replay_dir", config.replay_dir));
      genpipe::PromptConfig prompt;
      try {
        prompt = genpipe::load_prompt_config(config.prompt_dir);
      } catch (const std::exception& e) {
        throw HttpError{500, "prompt_config", e.what()};
      }
      const auto gen = genpipe::generate_program(rx, *backend, prompt);
      const auto pr = dsl::parse_program(gen.text);
      const auto r = store.put(RecordKind::kProgram, {{"source", gen.text},
                                                      {"prescription_id", rxr.id},
                                                      {"provenance", genpipe::provenance_to_json(gen.provenance)}});
      send_json(res, 201, {{"program_id", r.id},
                           {"source", gen.text},
                           {"provenance", genpipe::provenance_to_json(gen.provenance)},
                           {"parsed", pr.ok()},
                           {"diagnostics", diagnostics_json(pr.diagnostics)}});
    }));

    // ---- programs ----
    s.Post("/programs", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto body = parse_body(req);
      if (!body.contains("source") || !body.at("source").is_string()) {
        throw HttpError{400, "bad_request", "program needs a 'source' string"};
      }
      if (body.contains("prescription_id")) need(RecordKind::kPrescription, body.at("prescription_id"));
      const auto r = store.put(RecordKind::kProgram, body);
      send_json(res, 201, record_json(r));
    }));
    s.Get(R"(/programs/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, record_json(need(RecordKind::kProgram, req.matches[1])));
    }));
    s.Post(R"(/programs/([^/]+)/validate)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, validate_program(need(RecordKind::kProgram, req.matches[1])));
    }));

    // ---- scenarios ----
    s.Post("/scenarios", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto body = parse_body(req);
      sim::scenario_from_json(body);
      send_json(res, 201, record_json(store.put(RecordKind::kScenario, body)));
    }));
    s.Get("/scenarios", wrap([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"ids", store.list(RecordKind::kScenario)}});
    }));
    s.Get(R"(/scenarios/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, record_json(need(RecordKind::kScenario, req.matches[1])));
    }));

    // ---- sessions ----
    s.Post("/sessions", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      auto run = std::make_unique<Run>();
      run->program_id = body.at("program_id").get<std::string>();
      run->scenario_id = body.at("scenario_id").get<std::string>();
      run->rt_factor = body.value("rt_factor", config.default_rt_factor);
      run->program = parse_stored_program(need(RecordKind::kProgram, run->program_id));
      run->scenario = sim::scenario_from_json(need(RecordKind::kScenario, run->scenario_id).payload);
      try {
        sim::SimOptions opts;
        opts.hz = run->scenario.hz;
        sim::SimulatedPatient probe(run->program, run->scenario.profile, run->scenario.script,
                                    run->scenario.noise, opts);
      } catch (const std::exception& e) {
        throw HttpError{422, "invalid_scenario", e.what()};
      }
      run->id = new_ulid();
      hub.open(run->id);
      const std::string id = run->id;
      {
        std::lock_guard<std::mutex> lock(runs_mu);
        runs.emplace(id, std::move(run));
      }
      send_json(res, 201, {{"session_id", id}, {"state", "created"}});
    }));
    s.Post(R"(/sessions/([^/]+)/start)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      std::lock_guard<std::mutex> lock(runs_mu);
      auto it = runs.find(id);
      if (it == runs.end()) throw HttpError{404, "not_found", "session '" + id + "' not found"};
      if (it->second->state != RunState::kCreated) {
        throw HttpError{409, "already_started", "session '" + id + "' was already started"};
      }
      if (stopping.load()) throw HttpError{503, "shutting_down", "service is stopping"};
      Run* run = it->second.get();
      run->state = RunState::kRunning;
      run->worker = std::thread([this, run] { run_session_thread(run); });
      send_json(res, 202, {{"session_id", id}, {"state", "running"}});
    }));
    s.Get(R"(/sessions/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      {
        std::lock_guard<std::mutex> lock(runs_mu);
        auto it = runs.find(id);
        if (it != runs.end()) {
          json j = {{"session_id", id},
                    {"state", state_name(it->second->state)},
                    {"program_id", it->second->program_id},
                    {"scenario_id", it->second->scenario_id},
                    {"rt_factor", it->second->rt_factor},
                    {"last_seq", hub.last_seq(id)}};
          if (!it->second->error.empty()) j["error"] = it->second->error;
          send_json(res, 200, j);
          return;
        }
      }
      const auto rec = need(RecordKind::kSessionLog, id);
      send_json(res, 200, {{"session_id", id}, {"state", "done"}, {"program_id", rec.payload.value("program_id", "")}});
    }));
    s.Get(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      std::int64_t after = 0;
      if (req.has_param("from")) after = std::max<std::int64_t>(0, std::atoll(req.get_param_value("from").c_str()) - 1);
      if (req.has_header("Last-Event-ID")) after = std::atoll(req.get_header_value("Last-Event-ID").c_str());
      if (!hub.has(id)) {
        // Finished in an earlier process: replay from the stored log.
        auto rec = store.get(RecordKind::kSessionLog, id);
        if (!rec) {
          send_error(res, {404, "not_found", "session '" + id + "' not found"});
          return;
        }
        std::string body;
        for (const auto& e : rec->payload.at("events")) {
          if (e.at("seq").get<std::int64_t>() <= after) continue;
          body += "id: " + std::to_string(e.at("seq").get<std::int64_t>()) + "\nevent: " +
                  e.at("kind").get<std::string>() + "\ndata: " + e.dump() + "\n\n";
        }
        res.set_content(body, "text/event-stream");
        return;
      }
      res.set_header("Cache-Control", "no-cache");
      auto cursor = std::make_shared<std::int64_t>(after);
      res.set_chunked_content_provider("text/event-stream", [this, id, cursor](std::size_t, httplib::DataSink& sink) {
        const auto batch = hub.read(id, *cursor, std::chrono::milliseconds(200));
        for (const auto& e : batch) {
          const auto frame = sse_frame(e);
          if (!sink.write(frame.data(), frame.size())) return false;
          *cursor = e.seq;
        }
        if ((hub.closed(id) && *cursor == hub.last_seq(id)) || stopping.load()) {
          sink.done();
          return true;
        }
        if (batch.empty()) {
          static const std::string kPing = ": ping\n\n";
          if (!sink.write(kPing.data(), kPing.size())) return false;
        }
        return true;
      });
    });
    s.Get(R"(/sessions/([^/]+)/report)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      {
        std::lock_guard<std::mutex> lock(runs_mu);
        auto it = runs.find(id);
        if (it != runs.end() && it->second->state != RunState::kDone) {
          if (it->second->state == RunState::kFailed) {
            throw HttpError{500, "session_failed", it->second->error};
          }
          throw HttpError{409, "session_not_finished", "session '" + id + "' has not finished",
                          {{"state", state_name(it->second->state)}}};
        }
      }
      send_json(res, 200, session_report(id));
    }));

    // ---- evaluation ----
    s.Post("/eval", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto ids = body.at("session_ids").get<std::vector<std::string>>();
      std::vector<stats::PreLabel> labels;
      for (const auto& l : body.at("prelabels")) labels.push_back(stats::prelabel_from_json(l));
      const double gamma = body.value("gamma", 0.95);
      std::vector<runtime::SessionLog> logs;
      std::vector<runtime::PacingVerdict> pacing;
      stats::ErrorAttribution attr;
      std::set<std::pair<std::string, int>> flagged;
      for (const auto& id : ids) {
        const auto rec = need(RecordKind::kSessionLog, id);
        logs.push_back(runtime::log_from_json(rec.payload.at("log")));
        const auto truth = truth_from_json(rec.payload.at("truth"));
        const auto v = runtime::pacing_of(logs.back(), truth);
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (logs.back().steps[i].monitored) pacing.push_back(v[i]);
        }
        const auto prog = store.get(RecordKind::kProgram, rec.payload.value("program_id", ""));
        if (prog && prog->payload.contains("prescription_id")) {
          const auto rxr = store.get(RecordKind::kPrescription, prog->payload.at("prescription_id"));
          auto pr = dsl::parse_program(prog->payload.at("source").get<std::string>());
          if (rxr && pr.ok()) {
            for (const auto& f : genpipe::detect_hallucinated_monitors(
                     genpipe::prescription_from_json(rxr->payload), *pr.program)) {
              flagged.emplace(id, f.step_index);
            }
          }
        }
      }
      stats::ConfusionMatrix m;
      try {
        m = stats::confusion(labels, ids, logs);
      } catch (const stats::PairingError& e) {
        throw HttpError{422, "pairing_error", e.what()};
      }
      attr.steps = static_cast<std::int64_t>(labels.size());
      attr.hallucinated_steps = static_cast<std::int64_t>(flagged.size());
      for (const auto& l : labels) {
        const auto idx = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), l.session_id) - ids.begin());
        const auto& rec = logs[idx].steps.at(static_cast<std::size_t>(l.step_index - 1));
        if (rec.detected_complete != (l.expected == stats::Expected::kShouldComplete)) {
          ++attr.incorrect;
          if (flagged.count({l.session_id, l.step_index})) ++attr.incorrect_hallucinated;
        }
      }
      const auto report = stats::build_report(m, pacing, attr, gamma);
      auto j = stats::report_to_json(report);
      j["session_ids"] = ids;
      const auto r = store.put(RecordKind::kEvalReport, j);
      send_json(res, 201, {{"report_id", r.id}, {"report", j}, {"text", stats::report_to_text(report)}});
    }));

    // ---- retrofit ----
    s.Post("/retrofit", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto rxr = need(RecordKind::kPrescription, body.at("prescription_id").get<std::string>());
      const auto rx = genpipe::prescription_from_json(rxr.payload);
      std::string tid;
      if (body.contains("template_id")) {
        tid = body.at("template_id").is_number() ? std::to_string(body.at("template_id").get<int>())
                                                 : body.at("template_id").get<std::string>();
      } else if (rx.goal_id) {
        tid = std::to_string(*rx.goal_id);
      } else {
        throw HttpError{400, "bad_request", "custom prescriptions need a template_id"};
      }
      if (!tid.empty() && std::all_of(tid.begin(), tid.end(), ::isdigit)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "goal%02d", std::atoi(tid.c_str()));
        tid = buf;
      }
      const fs::path tp = fs::path(config.templates_dir) / (tid + ".json");
      if (tid.find('/') != std::string::npos || !fs::exists(tp)) {
        throw HttpError{404, "not_found", "template '" + tid + "' not found"};
      }
      const auto t = retrofit::load_template(tp.string());
      const auto v = retrofit::retrofit_check(rx, t);
      auto j = retrofit::verdict_to_json(v);
      j["prescription_id"] = rxr.id;
      j["template_id"] = tid;
      const auto r = store.put(RecordKind::kVerdict, j);
      send_json(res, 201, {{"verdict_id", r.id}, {"verdict", j}});
    }));

    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send_json(res, res.status, {{"code", res.status == 404 ? "not_found" : "http_error"},
                                    {"message", "HTTP " + std::to_string(res.status)},
                                    {"detail", json::object()}});
      }
    });
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

void Service::start() {
  auto& i = *impl_;
  if (i.config.port == 0) {
    i.bound_port = i.server.bind_to_any_port(i.config.host);
  } else {
    i.bound_port = i.server.bind_to_port(i.config.host, i.config.port) ? i.config.port : -1;
  }
  if (i.bound_port <= 0) {
    throw std::runtime_error("cannot bind " + i.config.host + ":" + std::to_string(i.config.port));
  }
  i.listener = std::thread([&i] { i.server.listen_after_bind(); });
  i.server.wait_until_ready();
}

void Service::wait() {
  if (impl_->listener.joinable()) impl_->listener.join();
}

void Service::stop() {
  auto& i = *impl_;
  if (i.stopping.exchange(true)) return;
  i.hub.shutdown();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(i.runs_mu);
    for (auto& [id, r] : i.runs) {
      if (r->worker.joinable()) workers.push_back(std::move(r->worker));
    }
  }
  for (auto& w : workers) w.join();
  i.server.stop();
  if (i.listener.joinable()) i.listener.join();
}

int Service::port() const { return impl_->bound_port; }

}  // namespace rehab::service
