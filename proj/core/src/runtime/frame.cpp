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
#include "rehab/runtime/frame.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "rehab/dsl/printer.hpp"

namespace rehab::runtime {

const char* to_string(Hand h) {
  switch (h) {
    case Hand::kNone: return "none";
    case Hand::kLeft: return "left";
    case Hand::kRight: return "right";
  }
  return "none";
}

Hand hand_from_string(const std::string& s) {
  if (s == "left") return Hand::kLeft;
  if (s == "right") return Hand::kRight;
  if (s == "none") return Hand::kNone;
  throw std::invalid_argument("unknown hand '" + s + "'");
}

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

RecordedSource::RecordedSource(std::vector<PoseFrame> frames) : frames_(std::move(frames)) {}

bool RecordedSource::pull_until(Micros t, std::vector<PoseFrame>& out) {
  while (next_ < frames_.size() && frames_[next_].timestamp <= t) out.push_back(frames_[next_++]);
  return !frames_.empty() && frames_.back().timestamp >= t;
}

std::string frames_to_csv(const std::vector<PoseFrame>& frames) {
  std::set<std::string> joints;
  std::set<std::string> objects;
  for (const auto& f : frames) {
    for (const auto& [k, v] : f.joint_angles) joints.insert(k);
    for (const auto& [k, v] : f.objects) objects.insert(k);
  }
  auto fmt = [](double v) { return dsl::format_number(v); };
  std::ostringstream os;
  os << "t";
  for (const auto& j : joints) os << ',' << j;
  for (const char* h : {kLeftHandChannel, kRightHandChannel}) {
    os << ',' << h << "_x," << h << "_y," << h << "_z";
  }
  for (const auto& o : objects) os << ',' << o << "_x," << o << "_y," << o << "_z," << o << "_held";
  os << ",invalid\n";
  for (const auto& f : frames) {
    os << fmt(to_seconds(f.timestamp));
    for (const auto& j : joints) {
      os << ',';
      if (auto it = f.joint_angles.find(j); it != f.joint_angles.end()) os << fmt(it->second);
    }
    for (const Vec3* h : {&f.left_hand, &f.right_hand}) {
      os << ',' << fmt(h->x) << ',' << fmt(h->y) << ',' << fmt(h->z);
    }
    for (const auto& o : objects) {
      auto it = f.objects.find(o);
      if (it == f.objects.end()) {
        os << ",,,,";
      } else {
        const auto& s = it->second;
        os << ',' << fmt(s.position.x) << ',' << fmt(s.position.y) << ',' << fmt(s.position.z)
           << ',' << to_string(s.held_by);
      }
    }
    os << ',';
    bool first = true;
    for (const auto& [ch, ok] : f.validity) {
      if (ok) continue;
      if (!first) os << ';';
      os << ch;
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rehab::runtime
