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
#ifndef REHAB_SIM_SIMULATOR_HPP_
#define REHAB_SIM_SIMULATOR_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rehab/common/rng.hpp"
#include "rehab/dsl/ast.hpp"
#include "rehab/runtime/frame.hpp"
#include "rehab/runtime/pacing.hpp"
#include "rehab/runtime/session.hpp"
#include "rehab/sim/profile.hpp"
#include "rehab/sim/track.hpp"

namespace rehab::sim {

using dsl::Vec3;

/// The script cannot drive the program (e.g. a monitored step has no entry).
class ScriptError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scripted completion cannot be realized under the profile's ROM or the
/// monitor's timing; the message names the step.
class InfeasibleMotion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimOptions {
  double hz = 10;
  bool record = false;               // keep every emitted frame
  std::optional<Micros> horizon;     // exhaust the stream after this time
};

/// Per-poll noise bookkeeping, used to check that injected rates match the model.
struct NoiseStats {
  std::int64_t fp_opportunities = 0;
  std::int64_t fp_injected = 0;
  std::int64_t fn_opportunities = 0;
  std::int64_t fn_injected = 0;
  std::int64_t channel_samples = 0;
  std::int64_t channels_dropped = 0;
};

/// Home positions of the hands (cm, table frame).
inline constexpr dsl::Vec3 kRightHandHome{15, -25, 0};
inline constexpr dsl::Vec3 kLeftHandHome{-15, -25, 0};

/// Standardized patient that reacts to announcements and emits pose frames.
class SimulatedPatient : public runtime::FrameSource {
 public:
  SimulatedPatient(const dsl::InterventionProgram& program, PatientProfile profile,
                   BehaviorScript script, NoiseModel noise, SimOptions options = {});

  void on_announce(const runtime::Announcement& a) override;
  bool pull_until(Micros t, std::vector<runtime::PoseFrame>& out) override;

  /// True completion time of a step once it has been announced.
  std::optional<Micros> truth(int step_index) const;
  runtime::GroundTruthTimes truth_for(const runtime::SessionLog& log) const;

  const NoiseStats& noise_stats() const { return stats_; }
  const std::vector<runtime::PoseFrame>& recorded() const { return recorded_; }

 private:
  struct ObjectTrack {
    Vec3 base;                      // position while not held
    runtime::Hand held = runtime::Hand::kNone;
    std::vector<std::pair<Micros, runtime::Hand>> events;
  };
  // Alternating jitter of a joint; when `anchored` the last jump lands
  // exactly on `stop` and the joint is still from then on.
  struct Fidget {
    double start = 0;
    double stop = 0;
    double period = 0.1;
    double a = 0;
    double b = 0;
    bool anchored = false;
    double at(double t) const;
  };
  struct JointChannel {
    Track<double> track;
    std::optional<Fidget> fidget;
    double at(double t) const;
    void freeze(double t);
  };

  Track<Vec3>& hand_track(runtime::Hand h);
  const Track<Vec3>& hand_track(runtime::Hand h) const;
  runtime::ObjectState object_state(const std::string& id, Micros t) const;
  void bake_objects(Micros t);
  runtime::PoseFrame sample(Micros t) const;
  void apply_noise(runtime::PoseFrame& f);
  void apply_dropout(runtime::PoseFrame& f);

  friend class StepPlanner;

  const dsl::InterventionProgram& program_;
  PatientProfile profile_;
  BehaviorScript script_;
  NoiseModel noise_;
  SimOptions options_;

  std::map<std::string, JointChannel> joints_;
  Track<Vec3> left_;
  Track<Vec3> right_;
  std::map<std::string, ObjectTrack> objects_;
  std::map<std::string, Vec3> targets_;

  std::map<int, std::optional<Micros>> truth_;
  const dsl::Expectation* active_ = nullptr;
  long next_frame_ = 0;
  std::optional<runtime::PoseFrame> last_emitted_;
  std::optional<runtime::PoseFrame> last_unsatisfied_;
  std::optional<runtime::PoseFrame> last_true_;
  Rng noise_rng_;
  Rng dropout_rng_;
  NoiseStats stats_;
  std::vector<runtime::PoseFrame> recorded_;
};

struct SimulationResult {
  std::vector<runtime::PoseFrame> frames;
  runtime::GroundTruthTimes truth;
  runtime::SessionLog log;
  NoiseStats noise;
};

/// Runs `program` against a fresh simulated patient and returns the emitted
/// stream, the ground truth and the session log.
SimulationResult simulate(const dsl::InterventionProgram& program, const PatientProfile& profile,
                          const BehaviorScript& script, const NoiseModel& noise, double hz = 10,
                          double poll_hz = 10);

/// Frame instants of a stream sampled at `hz`: round(k * 1e6 / hz) us.
Micros frame_instant(long k, double hz);

}  // namespace rehab::sim

#endif  // REHAB_SIM_SIMULATOR_HPP_
