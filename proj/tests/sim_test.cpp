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
#include "rehab/runtime/predicate.hpp"
#include "rehab/sim/prelabel.hpp"
#include "rehab/sim/scenario.hpp"
#include "rehab/sim/simulator.hpp"
#include "support/fixtures.hpp"

namespace rehab::sim {
namespace {

dsl::InterventionProgram one_step(const std::string& scene, const std::string& expect) {
  const auto r = dsl::parse_program("program \"p\"\n" + scene + "\nstep 1: say \"Go.\"\n  expect within 20s: " + expect + "\n");
  if (!r.ok()) throw std::runtime_error(dsl::format_diagnostics(r.diagnostics));
  return *r.program;
}

SimulationResult run(const dsl::InterventionProgram& p, Behavior b, NoiseModel noise = NoiseModel::none()) {
  BehaviorScript s;
  s.steps[1] = b;
  return simulate(p, standardized_patient(), s, noise);
}

TEST(Profile, StandardizedPatientBracesRightElbow) {
  const auto p = standardized_patient();
  EXPECT_EQ(p.rom("right_elbow_flexion"), (vocab::Band{80, 120}));
  EXPECT_EQ(p.affected_side, runtime::Hand::kRight);
}

TEST(Simulator, ElbowPlateausAtRomLimit) {
  const auto p = one_step("scene joint right_elbow_flexion", "joint_angle(right_elbow_flexion, 135, 145)");
  const auto r = run(p, Behavior::partial(0.9));
  double hi = 0;
  for (const auto& f : r.frames) hi = std::max(hi, f.joint_angles.at("right_elbow_flexion"));
  EXPECT_DOUBLE_EQ(hi, 120.0);
  EXPECT_DOUBLE_EQ(r.frames.back().joint_angles.at("right_elbow_flexion"), 120.0);
  EXPECT_FALSE(r.log.steps[0].detected_complete);
}

TEST(Simulator, CompleteAtOutsideRomIsInfeasible) {
  const auto p = one_step("scene joint right_elbow_flexion", "joint_angle(right_elbow_flexion, 135, 145)");
  EXPECT_THROW(run(p, Behavior::complete_at(4)), InfeasibleMotion);
}

TEST(Simulator, NoAttemptNeverSatisfiesMonitor) {
  const auto p = one_step("scene target t1 at (0, 30, 0)", "hand_at(t1, 5)");
  const auto r = run(p, Behavior::no_attempt());
  const auto ctx = runtime::make_context(p, Micros(0), 10);
  for (std::size_t i = 0; i < r.frames.size(); ++i) {
    ASSERT_FALSE(runtime::eval_atom(dsl::HandAt{"t1", 5}, std::span(r.frames.data(), i + 1), r.frames[i].timestamp, ctx));
  }
  EXPECT_TRUE(r.log.steps[0].timed_out);
}

TEST(Simulator, CompleteAtFirstSatisfyingFrame) {
  const auto p = one_step("scene target t1 at (0, 30, 0)", "hand_at(t1, 5)");
  const auto r = run(p, Behavior::complete_at(4.0));
  const auto ctx = runtime::make_context(p, Micros(0), 10);
  const auto announced = r.log.steps[0].announced_at;
  std::optional<Micros> first;
  for (std::size_t i = 0; i < r.frames.size() && !first; ++i) {
    if (runtime::eval_atom(dsl::HandAt{"t1", 5}, std::span(r.frames.data(), i + 1), r.frames[i].timestamp, ctx)) {
      first = r.frames[i].timestamp;
    }
  }
  ASSERT_TRUE(first.has_value());
  const double dt = to_seconds(*first - announced);
  EXPECT_GE(dt, 4.0);
  EXPECT_LE(dt, 4.1);
  ASSERT_TRUE(r.truth[0].has_value());
  EXPECT_EQ(*r.truth[0], *first);
}

TEST(Simulator, EveryAtomKindCompletesOnSchedule) {
  const std::string scene =
      "scene target t1 at (0, 30, 0)\nscene object cube at (10, 30, 0)\n"
      "scene joint right_shoulder_abduction\nscene joint left_wrist_flexion";
  for (const std::string expect :
       {"grasp(cube)", "release(cube)", "object_at(cube, t1, 8)", "joint_angle(right_shoulder_abduction, 60, 90)",
        "rest(left_wrist_flexion, 2s)", "hold(hand_at(t1, 5), 3s)", "count(grasp(cube), 2)",
        "all(hand_at(t1, 5), joint_angle(right_shoulder_abduction, 30, 150))", "any(grasp(cube), hand_at(t1, 5))"}) {
    const auto p = one_step(scene, expect);
    const auto r = run(p, Behavior::complete_at(5.0));
    ASSERT_TRUE(r.log.steps[0].detected_complete) << expect;
    const double dt = to_seconds(*r.log.steps[0].detection_at - r.log.steps[0].announced_at);
    EXPECT_GE(dt, 5.0) << expect;
    EXPECT_LE(dt, 5.1) << expect;
  }
}

TEST(Simulator, MissingScriptEntry) {
  const auto p = one_step("scene target t1 at (0, 30, 0)", "hand_at(t1, 5)");
  EXPECT_THROW(simulate(p, standardized_patient(), BehaviorScript{}, NoiseModel::none()), ScriptError);
}

TEST(Simulator, NoiseRatesAreObserved) {
  const auto ws = testing::worksheets();
  NoiseStats total;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto p = testing::faithful_program(ws[i]);
    const auto r = simulate(p, standardized_patient(), testing::complete_all(p, 6), NoiseModel{0.01, 0.3, 0.02, 100 + i});
    total.fp_opportunities += r.noise.fp_opportunities;
    total.fp_injected += r.noise.fp_injected;
    total.fn_opportunities += r.noise.fn_opportunities;
    total.fn_injected += r.noise.fn_injected;
    total.channel_samples += r.noise.channel_samples;
    total.channels_dropped += r.noise.channels_dropped;
  }
  ASSERT_GT(total.fp_opportunities, 1000);
  ASSERT_GT(total.fn_opportunities, 50);
  EXPECT_NEAR(static_cast<double>(total.fp_injected) / static_cast<double>(total.fp_opportunities), 0.01, 0.005);
  EXPECT_NEAR(static_cast<double>(total.fn_injected) / static_cast<double>(total.fn_opportunities), 0.3, 0.1);
  EXPECT_NEAR(static_cast<double>(total.channels_dropped) / static_cast<double>(total.channel_samples), 0.02, 0.005);
}

TEST(Prelabel, DefaultMix) {
  const auto m = make_prelabel_mix(398, 0.363, 1);
  EXPECT_EQ(m.incomplete(), 144);
  EXPECT_EQ(static_cast<std::int64_t>(m.labels.size()) - m.incomplete(), 254);
  int no_attempt = 0, partial = 0;
  for (const auto& b : m.behaviors) {
    no_attempt += b.kind == Behavior::Kind::kNoAttempt;
    partial += b.kind == Behavior::Kind::kPartialAttempt;
    if (b.kind == Behavior::Kind::kCompleteAt) {
      EXPECT_GE(b.offset_s, kMinCompleteOffsetS);
      EXPECT_LE(b.offset_s, kMaxCompleteOffsetS);
    }
  }
  EXPECT_EQ(no_attempt, 72);
  EXPECT_EQ(partial, 72);
}

TEST(Prelabel, ZeroFractionCompletesEverything) {
  const auto m = make_prelabel_mix(50, 0, 3);
  EXPECT_EQ(m.incomplete(), 0);
  for (const auto& b : m.behaviors) EXPECT_EQ(b.kind, Behavior::Kind::kCompleteAt);
}

TEST(Prelabel, SameSeedSameScript) {
  EXPECT_EQ(make_prelabel_mix(100, 0.4, 9).script, make_prelabel_mix(100, 0.4, 9).script);
  EXPECT_NE(make_prelabel_mix(100, 0.4, 9).script, make_prelabel_mix(100, 0.4, 10).script);
}

TEST(Scenario, JsonRoundTrip) {
  const auto s = load_scenario(testing::data_path("scenarios/goal01_zero_noise.json"));
  const auto back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(s));
  EXPECT_EQ(s.script.steps.size(), 9u);
}

TEST(Property, EmittedAnglesStayWithinRom) {
  Rng rng(4242);
  const auto profile = standardized_patient();
  int simulated = 0, rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_program(rng);
    const auto script = testing::random_script(p, rng);
    const NoiseModel noise{rng.uniform(0, 0.02), rng.uniform(0, 0.5), rng.uniform(0, 0.05), rng.next()};
    SimulationResult r;
    try {
      r = simulate(p, profile, script, noise);
    } catch (const InfeasibleMotion&) {
      ++rejected;
      continue;
    }
    ++simulated;
    for (const auto& f : r.frames) {
      for (const auto& [joint, angle] : f.joint_angles) {
        const auto rom = profile.rom(joint);
        ASSERT_GE(angle, rom.min_deg) << joint;
        ASSERT_LE(angle, rom.max_deg) << joint;
      }
    }
  }
  // Infeasible scripts are rejected up front; most random scripts run.
  EXPECT_GT(simulated, 500) << rejected << " rejected";
}

}  // namespace
}  // namespace rehab::sim
