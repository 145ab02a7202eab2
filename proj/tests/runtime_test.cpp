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

#include "rehab/dsl/parser.hpp"
#include "rehab/runtime/log_codec.hpp"
#include "rehab/runtime/pacing.hpp"
#include "rehab/runtime/predicate.hpp"
#include "rehab/runtime/session.hpp"
#include "rehab/sim/simulator.hpp"
#include "support/fixtures.hpp"

namespace rehab::runtime {
namespace {

using dsl::Vec3;

PoseFrame frame_at(double s) {
  PoseFrame f;
  f.timestamp = from_seconds(s);
  return f;
}

EvalContext ctx_with_target(const std::string& id, Vec3 at) {
  EvalContext c;
  c.targets[id] = at;
  return c;
}

TEST(Predicate, HandAtBoundaryInside) {
  auto f = frame_at(1);
  f.right_hand = {4.9, 0, 0};
  f.left_hand = {100, 100, 0};
  const std::vector<PoseFrame> w{f};
  EXPECT_TRUE(eval_atom(dsl::HandAt{"t1", 5}, w, from_seconds(1), ctx_with_target("t1", {0, 0, 0})));
  auto g = f;
  g.right_hand = {5.1, 0, 0};
  EXPECT_FALSE(eval_atom(dsl::HandAt{"t1", 5}, std::vector<PoseFrame>{g}, from_seconds(1), ctx_with_target("t1", {0, 0, 0})));
}

TEST(Predicate, HoldBrokenByOneOutOfRangePoll) {
  std::vector<PoseFrame> w;
  for (int k = 0; k <= 40; ++k) {
    auto f = frame_at(k * 0.1);
    f.joint_angles["right_elbow_flexion"] = k == 15 ? 125 : 100;
    w.push_back(f);
  }
  EvalContext c;
  c.polls = {Micros(0), 10};
  const dsl::Predicate hold = dsl::HoldFor{dsl::JointAngle{"right_elbow_flexion", 80, 120}, 3};
  EXPECT_FALSE(eval_predicate(hold, w, from_seconds(3.5), c));
  // Once the bad poll leaves the trailing window the hold is satisfied.
  std::vector<PoseFrame> longer = w;
  for (int k = 41; k <= 50; ++k) {
    auto f = frame_at(k * 0.1);
    f.joint_angles["right_elbow_flexion"] = 100;
    longer.push_back(f);
  }
  EXPECT_TRUE(eval_predicate(hold, longer, from_seconds(5.0), c));
}

TEST(Predicate, CountGraspReleaseGrasp) {
  std::vector<PoseFrame> w;
  const Hand seq[] = {Hand::kNone, Hand::kRight, Hand::kRight, Hand::kNone, Hand::kNone, Hand::kRight};
  for (int k = 0; k < 6; ++k) {
    auto f = frame_at(k * 0.1);
    f.objects["cube"] = {Vec3{0, 0, 0}, seq[k]};
    w.push_back(f);
  }
  EvalContext c;
  EXPECT_EQ(count_rising_edges(dsl::Grasp{"cube"}, w, from_seconds(0.5), c), 2);
  EXPECT_TRUE(eval_predicate(dsl::CountOf{dsl::Grasp{"cube"}, 2}, w, from_seconds(0.5), c));
  EXPECT_FALSE(eval_predicate(dsl::CountOf{dsl::Grasp{"cube"}, 3}, w, from_seconds(0.5), c));
}

TEST(Predicate, InvalidChannelIsNotSatisfied) {
  auto f = frame_at(1);
  f.right_hand = {0, 0, 0};
  f.left_hand = {100, 0, 0};
  f.validity["right_hand"] = false;
  EXPECT_FALSE(eval_atom(dsl::HandAt{"t1", 5}, std::vector<PoseFrame>{f}, from_seconds(1), ctx_with_target("t1", {0, 0, 0})));
}

struct Run {
  SessionLog log;
  GroundTruthTimes truth;
  std::vector<SessionEvent> events;
};

Run run_goal_one(const sim::BehaviorScript& script, std::uint64_t seed = 42) {
  const auto p = testing::faithful_program(testing::worksheet(1));
  sim::SimulatedPatient patient(p, sim::standardized_patient(), script, sim::NoiseModel::none(seed));
  VirtualClock clock;
  SessionConfig cfg;
  cfg.seed = seed;
  cfg.program_id = "goal01";
  Run r;
  r.log = run_session(p, patient, clock, cfg, [&](const SessionEvent& e) { r.events.push_back(e); });
  r.truth = patient.truth_for(r.log);
  return r;
}

TEST(Session, DetectionWithinOnePollOfCompletion) {
  const auto p = testing::faithful_program(testing::worksheet(1));
  auto script = testing::complete_all(p, 3);
  script.steps[6] = sim::Behavior::complete_at(4.0);
  const auto r = run_goal_one(script);
  const auto& s6 = r.log.steps.at(5);
  ASSERT_TRUE(s6.detected_complete);
  const double dt = to_seconds(*s6.detection_at - s6.announced_at);
  EXPECT_GE(dt, 4.0);
  EXPECT_LE(dt, 4.1);
}

TEST(Session, NoAttemptTimesOutAndAdvances) {
  const auto p = testing::faithful_program(testing::worksheet(1));
  auto script = testing::complete_all(p, 3);
  script.steps[6] = sim::Behavior::no_attempt();
  const auto r = run_goal_one(script);
  const auto& s6 = r.log.steps.at(5);
  EXPECT_FALSE(s6.detected_complete);
  EXPECT_TRUE(s6.timed_out);
  EXPECT_EQ(s6.advanced_at, s6.announced_at + std::chrono::seconds(20));
}

TEST(Session, RepeatedRunIsByteIdentical) {
  const auto p = testing::faithful_program(testing::worksheet(1));
  const auto a = run_goal_one(testing::complete_all(p, 3), 42);
  const auto b = run_goal_one(testing::complete_all(p, 3), 42);
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(log_to_json(a.log).dump(), log_to_json(b.log).dump());
  EXPECT_EQ(log_to_csv(a.log), log_to_csv(b.log));
}

TEST(Session, EventSequenceForGoalOne) {
  const auto p = testing::faithful_program(testing::worksheet(1));
  const auto r = run_goal_one(testing::complete_all(p, 3));
  int announced = 0, completed = 0, done = 0;
  for (const auto& e : r.events) {
    announced += e.kind == EventKind::kAnnounced;
    completed += e.kind == EventKind::kCompleted;
    done += e.kind == EventKind::kSessionDone;
  }
  EXPECT_EQ(announced, 11);
  EXPECT_EQ(completed, p.monitored_step_count());
  EXPECT_EQ(done, 1);
  EXPECT_EQ(r.events.back().kind, EventKind::kSessionDone);
}

TEST(Session, LogRoundTripsThroughJson) {
  const auto p = testing::faithful_program(testing::worksheet(1));
  const auto r = run_goal_one(testing::complete_all(p, 3));
  EXPECT_EQ(log_from_json(log_to_json(r.log)), r.log);
}

TEST(Session, PollRateOutOfRange) {
  const auto p = testing::faithful_program(testing::worksheet(1));
  sim::SimulatedPatient patient(p, sim::standardized_patient(), testing::complete_all(p, 3), sim::NoiseModel::none());
  VirtualClock clock;
  SessionConfig cfg;
  cfg.poll_hz = 0.5;
  EXPECT_THROW(run_session(p, patient, clock, cfg), std::invalid_argument);
}

TEST(Session, ExhaustedSourceTruncates) {
  const auto p = testing::faithful_program(testing::worksheet(1));
  RecordedSource src({});
  VirtualClock clock;
  EXPECT_THROW(run_session(p, src, clock, SessionConfig{}), TruncatedSession);
}

TEST(Session, FallbackIsMonitoredOnce) {
  const auto r = dsl::parse_program(
      "program \"p\"\nscene target t1 at (0, 30, 0)\n"
      "step 1: say \"Touch the target.\"\n  expect within 5s: hand_at(t1, 5)\n"
      "  on timeout: say \"Try once more.\"\n    expect within 5s: hand_at(t1, 5)\n");
  ASSERT_TRUE(r.ok());
  sim::BehaviorScript script;
  script.steps[1] = sim::Behavior::no_attempt();
  sim::SimulatedPatient patient(*r.program, sim::standardized_patient(), script, sim::NoiseModel::none());
  VirtualClock clock;
  const auto log = run_session(*r.program, patient, clock, SessionConfig{});
  ASSERT_EQ(log.steps.size(), 1u);
  EXPECT_TRUE(log.steps[0].timed_out);
  EXPECT_TRUE(log.steps[0].fallback_engaged);
  ASSERT_TRUE(log.steps[0].fallback.has_value());
  EXPECT_TRUE(log.steps[0].fallback->timed_out);
  EXPECT_EQ(log.steps[0].advanced_at, std::chrono::seconds(10));
}

TEST(Pacing, Verdicts) {
  SessionLog log;
  StepRecord adequate;
  adequate.index = 1;
  adequate.monitored = true;
  adequate.detected_complete = true;
  adequate.detection_at = from_seconds(4.1);
  adequate.advanced_at = from_seconds(4.1);
  StepRecord premature = adequate;
  premature.index = 2;
  premature.detection_at = from_seconds(1.0);
  premature.advanced_at = from_seconds(1.0);
  StepRecord delayed = adequate;
  delayed.index = 3;
  delayed.detected_complete = false;
  delayed.detection_at.reset();
  delayed.timed_out = true;
  delayed.advanced_at = from_seconds(20);
  log.steps = {adequate, premature, delayed};
  const GroundTruthTimes truth{from_seconds(4.0), from_seconds(6.0), from_seconds(4.0)};
  const auto v = pacing_of(log, truth);
  EXPECT_EQ(v, (std::vector<PacingVerdict>{PacingVerdict::kAdequate, PacingVerdict::kPremature, PacingVerdict::kDelayed}));
  EXPECT_TRUE(is_false_positive_detection(premature, truth[1]));
  EXPECT_FALSE(is_false_positive_detection(adequate, truth[0]));
  EXPECT_THROW(pacing_of(log, GroundTruthTimes{}), std::invalid_argument);
}

TEST(Property, SessionTimestampsAreMonotone) {
  Rng rng(31);
  const auto ws = testing::worksheets();
  for (int i = 0; i < 200; ++i) {
    const auto& rx = ws[static_cast<std::size_t>(i) % ws.size()];
    const auto p = testing::faithful_program(rx);
    const sim::NoiseModel noise{rng.uniform(0, 0.01), rng.uniform(0, 0.5), rng.uniform(0, 0.05), rng.next()};
    const auto res = sim::simulate(p, sim::standardized_patient(), testing::random_script(p, rng), noise);
    Micros last{0};
    for (const auto& s : res.log.steps) {
      ASSERT_GE(s.announced_at, last);
      if (s.detection_at) {
        ASSERT_GE(*s.detection_at, s.announced_at);
        ASSERT_LE(*s.detection_at, s.advanced_at);
      }
      ASSERT_GE(s.advanced_at, s.announced_at);
      last = s.advanced_at;
    }
  }
}

}  // namespace
}  // namespace rehab::runtime
