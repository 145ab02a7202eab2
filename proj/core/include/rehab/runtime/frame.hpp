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
#ifndef REHAB_RUNTIME_FRAME_HPP_
#define REHAB_RUNTIME_FRAME_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rehab/common/time.hpp"
#include "rehab/dsl/ast.hpp"

namespace rehab::runtime {

using dsl::Vec3;

enum class Hand { kNone, kLeft, kRight };

const char* to_string(Hand h);
Hand hand_from_string(const std::string& s);

inline constexpr const char* kLeftHandChannel = "left_hand";
inline constexpr const char* kRightHandChannel = "right_hand";

struct ObjectState {
  Vec3 position;
  Hand held_by = Hand::kNone;
  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

/// One sensor observation. Channels are joint names, "left_hand",
/// "right_hand" and object ids; a channel missing from `validity` is valid.
struct PoseFrame {
  Micros timestamp{0};
  std::map<std::string, double> joint_angles;
  Vec3 left_hand;
  Vec3 right_hand;
  std::map<std::string, ObjectState> objects;
  std::map<std::string, bool> validity;

  bool valid(const std::string& channel) const {
    auto it = validity.find(channel);
    return it == validity.end() || it->second;
  }

  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

double distance(const Vec3& a, const Vec3& b);

/// Raised when a frame source runs out before the session ends.
class SourceExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Announcement {
  int step_index = 0;
  bool fallback = false;
  Micros at{0};
  const dsl::Step* step = nullptr;
  const dsl::Expectation* expectation = nullptr;  // null for announce-only steps
};

/// Producer of pose frames. The runtime tells the source about every
/// announcement before pulling frames past it, so reactive sources (the
/// simulated patient) can respond to instructions.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual void on_announce(const Announcement& /*a*/) {}
  /// Appends every frame with timestamp <= t not yet delivered. Returns false
  /// when the source cannot cover t.
  virtual bool pull_until(Micros t, std::vector<PoseFrame>& out) = 0;
};

/// Replays a fixed, pre-recorded stream.
class RecordedSource : public FrameSource {
 public:
  explicit RecordedSource(std::vector<PoseFrame> frames);
  bool pull_until(Micros t, std::vector<PoseFrame>& out) override;

 private:
  std::vector<PoseFrame> frames_;
  std::size_t next_ = 0;
};

/// CSV export of a frame stream: one row per frame, one column per channel.
std::string frames_to_csv(const std::vector<PoseFrame>& frames);

}  // namespace rehab::runtime

#endif  // REHAB_RUNTIME_FRAME_HPP_
