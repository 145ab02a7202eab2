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
#include <gtest/gtest.h>

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "rehab/service/events.hpp"
#include "rehab/service/server.hpp"
#include "rehab/service/store.hpp"
#include "rehab/service/ulid.hpp"
#include "support/fixtures.hpp"

namespace rehab::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::data_path;

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

TEST(Ulid, SortableAndUnique) {
  std::vector<std::string> ids;
  for (int i = 0; i < 5000; ++i) ids.push_back(new_ulid());
  EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
  for (const auto& id : ids) ASSERT_TRUE(is_ulid(id)) << id;
  EXPECT_FALSE(is_ulid("not-a-ulid"));
  EXPECT_FALSE(is_ulid("01ARZ3NDEKTSV4RRFFQ69G5FAU"));  // U is not in the alphabet
}

TEST(Ulid, EncodesTimeFirst) {
  EXPECT_EQ(encode_ulid(0, 0, 0), std::string(26, '0'));
  EXPECT_LT(encode_ulid(1, 0xffff, ~0ULL), encode_ulid(2, 0, 0));
}

TEST(Store, RoundTripForEveryKind) {
  const auto dir = testing::scratch_dir("store-roundtrip");
  Store store(dir.string());
  for (auto kind : all_record_kinds()) {
    const json payload = {{"kind", to_string(kind)}, {"values", {1, 2.5, "x"}}, {"nested", {{"a", nullptr}}}};
    const auto put = store.put(kind, payload);
    EXPECT_TRUE(is_ulid(put.id));
    const auto got = store.get(kind, put.id);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(got->payload, payload);
    EXPECT_EQ(got->digest, put.digest);
    EXPECT_EQ(got->digest, payload_digest(payload));
  }
  Store reopened(dir.string());
  for (auto kind : all_record_kinds()) EXPECT_EQ(reopened.list(kind).size(), 1u);
  EXPECT_TRUE(reopened.quarantined().empty());
}

TEST(Store, RecordKindNames) {
  for (auto kind : all_record_kinds()) EXPECT_EQ(record_kind_from_string(to_string(kind)), kind);
  EXPECT_FALSE(record_kind_from_string("bogus").has_value());
}

TEST(Store, CrashLeftoversAreNeverVisible) {
  const auto dir = testing::scratch_dir("store-crash");
  std::string good, tampered;
  {
    Store store(dir.string());
    good = store.put(RecordKind::kProgram, json{{"source", "x"}}).id;
    tampered = store.put(RecordKind::kProgram, json{{"source", "y"}}).id;
  }
  const auto kind_dir = dir / "program";
  // Interrupted write: temp file never renamed.
  std::ofstream(kind_dir / (new_ulid() + ".json.tmp-" + new_ulid())) << "{\"kind\": \"program\", \"id\"";
  // Torn final file and a payload that no longer matches its digest.
  std::ofstream(kind_dir / (new_ulid() + ".json")) << "{\"kind\": \"program\", \"payl";
  auto doc = read_json((kind_dir / (tampered + ".json")).string());
  doc["payload"]["source"] = "z";
  std::ofstream(kind_dir / (tampered + ".json")) << doc.dump();

  Store store(dir.string());
  EXPECT_EQ(store.list(RecordKind::kProgram), std::vector<std::string>{good});
  EXPECT_FALSE(store.get(RecordKind::kProgram, tampered).has_value());
  EXPECT_EQ(store.quarantined().size(), 2u);
  for (const auto& e : fs::directory_iterator(kind_dir)) {
    EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos);
  }
}

TEST(Store, ConcurrentWritersKeepEveryRecord) {
  const auto dir = testing::scratch_dir("store-concurrent");
  Store store(dir.string());
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&store, t] {
      for (int i = 0; i < 25; ++i) store.put(RecordKind::kScenario, json{{"t", t}, {"i", i}});
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(store.list(RecordKind::kScenario).size(), 200u);
  EXPECT_EQ(store.counts().at("scenario"), 200u);
}

runtime::SessionEvent ev(runtime::EventKind k, int step) {
  runtime::SessionEvent e;
  e.kind = k;
  e.step_index = step;
  return e;
}

TEST(EventHub, GaplessAndClosedBySessionDone) {
  EventHub hub;
  hub.open("a");
  hub.open("b");
  EXPECT_THROW(hub.publish("zzz", ev(runtime::EventKind::kAnnounced, 1)), std::exception);
  for (int i = 1; i <= 5; ++i) {
    EXPECT_EQ(hub.publish("a", ev(runtime::EventKind::kAnnounced, i)).seq, i);
    if (i % 2) hub.publish("b", ev(runtime::EventKind::kAnnounced, i));
  }
  hub.publish("a", ev(runtime::EventKind::kSessionDone, 0));
  EXPECT_TRUE(hub.closed("a"));
  EXPECT_FALSE(hub.closed("b"));
  const auto all = hub.read("a", 0, std::chrono::milliseconds(0));
  ASSERT_EQ(all.size(), 6u);
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].seq, static_cast<std::int64_t>(i + 1));
    EXPECT_EQ(all[i].session_id, "a");
  }
  EXPECT_EQ(hub.read("a", 4, std::chrono::milliseconds(0)).size(), 2u);
  EXPECT_EQ(hub.last_seq("b"), 3);
}

TEST(EventHub, ReaderWakesOnPublish) {
  EventHub hub;
  hub.open("s");
  std::thread writer([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    hub.publish("s", ev(runtime::EventKind::kAnnounced, 1));
  });
  const auto got = hub.read("s", 0, std::chrono::seconds(5));
  writer.join();
  ASSERT_EQ(got.size(), 1u);
}

TEST(EventHub, SseFraming) {
  StreamEvent e{"s1", 7, ev(runtime::EventKind::kCompleted, 3)};
  const auto frame = sse_frame(e);
  EXPECT_EQ(frame.rfind("id: 7\nevent: Completed\ndata: ", 0), 0u);
  EXPECT_EQ(frame.substr(frame.size() - 2), "\n\n");
  const auto data = json::parse(frame.substr(frame.find("data: ") + 6));
  EXPECT_EQ(data.at("session_id"), "s1");
  EXPECT_EQ(data.at("seq"), 7);
  EXPECT_EQ(data.at("step"), 3);
}

// ---- HTTP ----

struct SseEvent {
  std::int64_t id = 0;
  std::string kind;
  json data;
};

std::vector<SseEvent> parse_sse(const std::string& body) {
  std::vector<SseEvent> out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto end = body.find("\n\n", pos);
    if (end == std::string::npos) break;
    const auto block = body.substr(pos, end - pos);
    pos = end + 2;
    if (block.rfind(":", 0) == 0) continue;  // keep-alive comment
    SseEvent e;
    std::size_t ls = 0;
    while (ls < block.size()) {
      auto le = block.find('\n', ls);
      if (le == std::string::npos) le = block.size();
      const auto line = block.substr(ls, le - ls);
      if (line.rfind("id: ", 0) == 0) e.id = std::stoll(line.substr(4));
      if (line.rfind("event: ", 0) == 0) e.kind = line.substr(7);
      if (line.rfind("data: ", 0) == 0) e.data = json::parse(line.substr(6));
      ls = le + 1;
    }
    out.push_back(std::move(e));
  }
  return out;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceConfig cfg;
    cfg.data_dir = testing::scratch_dir(std::string("service-") +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name())
                       .string();
    cfg.port = 0;
    cfg.prompt_dir = data_path("prompt");
    cfg.templates_dir = data_path("templates");
    cfg.replay_dir = data_path("replays");
    cfg.default_rt_factor = 0;
    data_dir_ = cfg.data_dir;
    service_ = std::make_unique<Service>(cfg);
    service_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", service_->port());
    client_->set_read_timeout(60, 0);
  }

  void TearDown() override {
    client_.reset();
    service_->stop();
  }

  json post(const std::string& path, const json& body, int expect_status) {
    auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res) << path;
    if (!res) return {};
    EXPECT_EQ(res->status, expect_status) << path << " " << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expect_status = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res) << path;
    if (!res) return {};
    EXPECT_EQ(res->status, expect_status) << path << " " << res->body;
    return json::parse(res->body);
  }

  std::string stream(const std::string& session, const httplib::Headers& headers = {}) {
    httplib::Client c("127.0.0.1", service_->port());
    c.set_read_timeout(60, 0);
    std::string body;
    auto res = c.Get("/sessions/" + session + "/events", headers, [&](const char* data, std::size_t n) {
      body.append(data, n);
      return true;
    });
    EXPECT_TRUE(res);
    if (res) EXPECT_EQ(res->status, 200);
    return body;
  }

  // Goal-1 prescription, generated program and zero-noise scenario.
  std::pair<std::string, std::string> goal_one() {
    const auto rx = post("/prescriptions", read_json(data_path("worksheets/goal01.json")), 201);
    const auto gen = post("/prescriptions/" + rx.at("id").get<std::string>() + "/generate", {{"backend", "deterministic"}}, 201);
    EXPECT_TRUE(gen.at("parsed").get<bool>());
    const auto sc = post("/scenarios", read_json(data_path("scenarios/goal01_zero_noise.json")), 201);
    return {gen.at("program_id"), sc.at("id")};
  }

  std::string create_session(double rt_factor) {
    const auto [program, scenario] = goal_one();
    const auto s = post("/sessions", {{"program_id", program}, {"scenario_id", scenario}, {"rt_factor", rt_factor}}, 201);
    return s.at("session_id");
  }

  std::string data_dir_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, PrescriptionRoundTrip) {
  const auto payload = read_json(data_path("worksheets/goal03.json"));
  const auto created = post("/prescriptions", payload, 201);
  const auto fetched = get("/prescriptions/" + created.at("id").get<std::string>());
  EXPECT_EQ(fetched.at("payload"), payload);
  EXPECT_EQ(fetched.at("digest"), created.at("digest"));
  EXPECT_EQ(get("/prescriptions").at("ids").size(), 1u);
}

TEST_F(ServiceTest, RoundTripDigestForEveryPostedKind) {
  const auto rx = post("/prescriptions", read_json(data_path("worksheets/goal02.json")), 201);
  const auto prog = post("/programs", {{"source", "program \"p\"\nstep 1: say \"Rest.\"\n"}}, 201);
  const auto sc = post("/scenarios", read_json(data_path("scenarios/goal01_zero_noise.json")), 201);
  EXPECT_EQ(get("/prescriptions/" + rx.at("id").get<std::string>()).at("digest"), rx.at("digest"));
  EXPECT_EQ(get("/programs/" + prog.at("id").get<std::string>()).at("digest"), prog.at("digest"));
  EXPECT_EQ(get("/scenarios/" + sc.at("id").get<std::string>()).at("digest"), sc.at("digest"));
}

TEST_F(ServiceTest, HealthReportsCountsPerKind) {
  post("/prescriptions", read_json(data_path("worksheets/goal01.json")), 201);
  post("/prescriptions", read_json(data_path("worksheets/goal02.json")), 201);
  const auto h = get("/health");
  EXPECT_EQ(h.at("status"), "ok");
  EXPECT_EQ(h.at("counts").at("prescription"), 2);
  for (const char* k : {"program", "scenario", "session_log", "eval_report", "verdict"}) EXPECT_EQ(h.at("counts").at(k), 0);
  EXPECT_TRUE(h.at("quarantined").empty());
}

TEST_F(ServiceTest, ErrorsCarryCodeMessageDetail) {
  const auto e = get("/prescriptions/nope", 404);
  EXPECT_EQ(e.at("code"), "not_found");
  EXPECT_TRUE(e.contains("message"));
  EXPECT_TRUE(e.contains("detail"));
  auto res = client_->Post("/prescriptions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body).at("code"), "bad_json");
  const auto unknown = post("/sessions", {{"program_id", "x"}, {"scenario_id", "y"}}, 404);
  EXPECT_EQ(unknown.at("code"), "not_found");
  EXPECT_EQ(get("/no/such/route", 404).at("code"), "not_found");
}

TEST_F(ServiceTest, InvalidProgramIsRejectedBeforeStart) {
  const auto prog = post("/programs", {{"source", "program \"p\"\nstep 1: say \"a\"\nstep 3: say \"b\"\n"}}, 201);
  const auto v = post("/programs/" + prog.at("id").get<std::string>() + "/validate", json::object(), 200);
  EXPECT_FALSE(v.at("ok").get<bool>());
  const auto sc = post("/scenarios", read_json(data_path("scenarios/goal01_zero_noise.json")), 201);
  const auto e = post("/sessions", {{"program_id", prog.at("id")}, {"scenario_id", sc.at("id")}}, 422);
  EXPECT_EQ(e.at("code"), "invalid_program");
}

TEST_F(ServiceTest, GeneratedProgramValidates) {
  const auto [program, scenario] = goal_one();
  const auto v = post("/programs/" + program + "/validate", json::object(), 200);
  EXPECT_TRUE(v.at("ok").get<bool>()) << v.dump();
  EXPECT_TRUE(v.at("fidelity").at("correct").get<bool>());
  EXPECT_TRUE(v.at("hallucinations").empty());
}

TEST_F(ServiceTest, ReplayBackendAndMissingTranscript) {
  const auto rx = post("/prescriptions", read_json(data_path("worksheets/goal07.json")), 201);
  const auto id = rx.at("id").get<std::string>();
  const auto gen = post("/prescriptions/" + id + "/generate", {{"backend", "replay"}}, 201);
  EXPECT_EQ(gen.at("provenance").at("backend"), "replay");
  auto custom = read_json(data_path("worksheets/goal07.json"));
  custom["steps"][0]["text"] = "A step no transcript has seen.";
  const auto rx2 = post("/prescriptions", custom, 201);
  const auto e = post("/prescriptions/" + rx2.at("id").get<std::string>() + "/generate", {{"backend", "replay"}}, 404);
  EXPECT_EQ(e.at("code"), "transcript_missing");
}

TEST_F(ServiceTest, GoalOneSessionEventStream) {
  const auto sid = create_session(0);
  EXPECT_EQ(post("/sessions/" + sid + "/start", json::object(), 202).at("state"), "running");
  const auto events = parse_sse(stream(sid));
  int announced = 0, completed = 0, done = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(events[i].id, static_cast<std::int64_t>(i + 1));
    EXPECT_EQ(events[i].data.at("session_id"), sid);
    EXPECT_EQ(events[i].data.at("kind"), events[i].kind);
    announced += events[i].kind == "Announced";
    completed += events[i].kind == "Completed";
    done += events[i].kind == "SessionDone";
  }
  EXPECT_EQ(announced, 11);
  EXPECT_EQ(completed, 9);
  EXPECT_EQ(done, 1);
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.back().kind, "SessionDone");

  const auto report = get("/sessions/" + sid + "/report");
  EXPECT_EQ(report.at("summary").at("monitored"), 9);
  EXPECT_EQ(report.at("summary").at("detected_complete"), 9);
  EXPECT_EQ(report.at("summary").at("adequate"), 9);
  EXPECT_EQ(post("/sessions/" + sid + "/start", json::object(), 409).at("code"), "already_started");
}

TEST_F(ServiceTest, LateSubscriberGetsBacklogThenLiveTail) {
  const auto sid = create_session(40);
  post("/sessions/" + sid + "/start", json::object(), 202);
  for (int i = 0; i < 200 && get("/sessions/" + sid).at("last_seq").get<int>() < 3; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  const auto mid = get("/sessions/" + sid);
  EXPECT_EQ(mid.at("state"), "running");
  const auto events = parse_sse(stream(sid));
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.front().id, 1);
  for (std::size_t i = 0; i < events.size(); ++i) ASSERT_EQ(events[i].id, static_cast<std::int64_t>(i + 1));
  EXPECT_EQ(events.back().kind, "SessionDone");

  // Resuming after event 10 yields exactly the suffix.
  const auto resumed = parse_sse(stream(sid, {{"Last-Event-ID", "10"}}));
  ASSERT_EQ(resumed.size(), events.size() - 10);
  EXPECT_EQ(resumed.front().id, 11);
}

TEST_F(ServiceTest, ConcurrentSessionsNeverInterleave) {
  const auto a = create_session(60);
  const auto b = create_session(60);
  post("/sessions/" + a + "/start", json::object(), 202);
  post("/sessions/" + b + "/start", json::object(), 202);
  std::string body_a, body_b;
  std::thread ta([&] { body_a = stream(a); });
  std::thread tb([&] { body_b = stream(b); });
  ta.join();
  tb.join();
  for (const auto& [sid, body] : {std::pair{a, body_a}, std::pair{b, body_b}}) {
    const auto events = parse_sse(body);
    ASSERT_FALSE(events.empty());
    for (std::size_t i = 0; i < events.size(); ++i) {
      EXPECT_EQ(events[i].data.at("session_id"), sid);
      EXPECT_EQ(events[i].id, static_cast<std::int64_t>(i + 1));
    }
    EXPECT_EQ(events.back().kind, "SessionDone");
  }
}

TEST_F(ServiceTest, EvalOverSessions) {
  const auto sid = create_session(0);
  post("/sessions/" + sid + "/start", json::object(), 202);
  stream(sid);
  const auto report = get("/sessions/" + sid + "/report");
  json labels = json::array();
  for (const auto& s : report.at("log").at("steps")) {
    if (!s.at("monitored").get<bool>()) continue;
    labels.push_back({{"session_id", sid}, {"step", s.at("index")}, {"expected", "should_complete"}});
  }
  const auto eval = post("/eval", {{"session_ids", {sid}}, {"prelabels", labels}}, 201);
  EXPECT_EQ(eval.at("report").at("matrix").at("tp"), 9);
  EXPECT_DOUBLE_EQ(eval.at("report").at("accuracy").at("point").get<double>(), 1.0);
  labels.erase(labels.begin());
  EXPECT_EQ(post("/eval", {{"session_ids", {sid}}, {"prelabels", labels}}, 422).at("code"), "pairing_error");
}

TEST_F(ServiceTest, RetrofitEndpoint) {
  const auto rx = post("/prescriptions", read_json(data_path("corpus/ex06_t02.json")), 201);
  const auto v = post("/retrofit", {{"prescription_id", rx.at("id")}, {"template_id", 6}}, 201);
  EXPECT_FALSE(v.at("verdict").at("translatable").get<bool>());
  const auto cats = v.at("verdict").at("categories");
  EXPECT_EQ(cats, json({"Contingency", "CompensatoryStrategyOptions"}));
  EXPECT_EQ(post("/retrofit", {{"prescription_id", rx.at("id")}, {"template_id", "goal99"}}, 404).at("code"), "not_found");
  EXPECT_EQ(get("/health").at("counts").at("verdict"), 1);
}

TEST_F(ServiceTest, FinishedSessionReplaysAfterRestart) {
  const auto sid = create_session(0);
  post("/sessions/" + sid + "/start", json::object(), 202);
  const auto before = parse_sse(stream(sid));
  client_.reset();
  service_->stop();
  ServiceConfig cfg;
  cfg.data_dir = data_dir_;
  cfg.port = 0;
  service_ = std::make_unique<Service>(cfg);
  service_->start();
  client_ = std::make_unique<httplib::Client>("127.0.0.1", service_->port());
  const auto after = parse_sse(stream(sid));
  ASSERT_EQ(after.size(), before.size());
  for (std::size_t i = 0; i < after.size(); ++i) EXPECT_EQ(after[i].data, before[i].data);
  EXPECT_EQ(get("/sessions/" + sid).at("state"), "done");
}

}  // namespace
}  // namespace rehab::service
