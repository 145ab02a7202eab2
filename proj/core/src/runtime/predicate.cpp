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
#include "rehab/runtime/predicate.hpp"

#include <algorithm>
#include <cmath>

namespace rehab::runtime {

using namespace rehab::dsl;

EvalContext make_context(const InterventionProgram& p, Micros start, double poll_hz) {
  EvalContext ctx;
  for (const auto& d : p.scene) {
    if (d.kind == SceneKind::kTarget && d.position) ctx.targets[d.id] = *d.position;
  }
  ctx.polls.start = start;
  ctx.polls.hz = poll_hz;
  return ctx;
}

namespace {

// Index one past the last frame with timestamp <= t.
std::size_t upper(std::span<const PoseFrame> w, Micros t) {
  auto it = std::upper_bound(w.begin(), w.end(), t,
                             [](Micros v, const PoseFrame& f) { return v < f.timestamp; });
  return static_cast<std::size_t>(it - w.begin());
}

const Vec3& target_position(const std::string& id, const EvalContext& ctx) {
  auto it = ctx.targets.find(id);
  if (it == ctx.targets.end()) throw ChannelMissing("target '" + id + "' has no position");
  return it->second;
}

double joint_value(const PoseFrame& f, const std::string& joint) {
  auto it = f.joint_angles.find(joint);
  if (it == f.joint_angles.end()) throw ChannelMissing("joint channel '" + joint + "' missing");
  return it->second;
}

const ObjectState& object_value(const PoseFrame& f, const std::string& object) {
  auto it = f.objects.find(object);
  if (it == f.objects.end()) throw ChannelMissing("object channel '" + object + "' missing");
  return it->second;
}

// Latest frame in w[0, end) valid for `channel`, or nullptr.
const PoseFrame* latest_valid(std::span<const PoseFrame> w, std::size_t end,
                              const std::string& channel) {
  for (std::size_t i = end; i-- > 0;) {
    if (w[i].valid(channel)) return &w[i];
  }
  return nullptr;
}

const std::string& channel_of(const Atom& a) {
  if (const auto* x = std::get_if<JointAngle>(&a)) return x->joint;
  if (const auto* x = std::get_if<Grasp>(&a)) return x->object;
  if (const auto* x = std::get_if<Release>(&a)) return x->object;
  if (const auto* x = std::get_if<ObjectAt>(&a)) return x->object;
  if (const auto* x = std::get_if<Rest>(&a)) return x->joint;
  static const std::string kHands = "hands";
  return kHands;
}

bool hand_within(const PoseFrame* left, const PoseFrame* right, const Vec3& target, double r) {
  if (left && distance(left->left_hand, target) <= r) return true;
  if (right && distance(right->right_hand, target) <= r) return true;
  return false;
}

// Frame-local level of an atom; Rest is handled by the caller.
bool frame_level(const Atom& a, const PoseFrame& f, const EvalContext& ctx) {
  if (const auto* x = std::get_if<JointAngle>(&a)) {
    const double v = joint_value(f, x->joint);
    return v >= x->min_deg && v <= x->max_deg;
  }
  if (const auto* x = std::get_if<HandAt>(&a)) {
    const Vec3& t = target_position(x->target, ctx);
    return hand_within(f.valid(kLeftHandChannel) ? &f : nullptr,
                       f.valid(kRightHandChannel) ? &f : nullptr, t, x->radius_cm);
  }
  if (const auto* x = std::get_if<Grasp>(&a)) return object_value(f, x->object).held_by != Hand::kNone;
  if (const auto* x = std::get_if<Release>(&a)) return object_value(f, x->object).held_by == Hand::kNone;
  if (const auto* x = std::get_if<ObjectAt>(&a)) {
    return distance(object_value(f, x->object).position, target_position(x->target, ctx)) <=
           x->radius_cm;
  }
  return false;
}

bool rest_at(const Rest& r, std::span<const PoseFrame> w, Micros now, const EvalContext& ctx) {
  const Micros from = now - from_seconds(r.seconds);
  if (from < ctx.polls.start) return false;
  const std::size_t end = upper(w, now);
  const PoseFrame* base = latest_valid(w, upper(w, from), r.joint);
  if (base == nullptr) return false;
  double travel = 0;
  double prev = joint_value(*base, r.joint);
  for (std::size_t i = static_cast<std::size_t>(base - w.data()) + 1; i < end; ++i) {
    if (!w[i].valid(r.joint)) continue;
    const double v = joint_value(w[i], r.joint);
    travel += std::abs(v - prev);
    prev = v;
  }
  return travel < kRestTravelDeg;
}

// Whether a held-state edge (none -> held for grasp, held -> none for release)
// occurs among the valid frames of w[0, end).
bool held_edge(const std::string& object, bool to_held, std::span<const PoseFrame> w,
               std::size_t end) {
  std::optional<bool> prev;
  for (std::size_t i = 0; i < end; ++i) {
    if (!w[i].valid(object)) continue;
    const bool held = object_value(w[i], object).held_by != Hand::kNone;
    if (prev && *prev != held && held == to_held) return true;
    prev = held;
  }
  return false;
}

}  // namespace

bool eval_atom(const Atom& atom, std::span<const PoseFrame> w, Micros now, const EvalContext& ctx) {
  const std::size_t end = upper(w, now);
  if (const auto* x = std::get_if<Rest>(&atom)) return rest_at(*x, w, now, ctx);
  if (const auto* x = std::get_if<Grasp>(&atom)) return held_edge(x->object, true, w, end);
  if (const auto* x = std::get_if<Release>(&atom)) return held_edge(x->object, false, w, end);
  if (const auto* x = std::get_if<HandAt>(&atom)) {
    const Vec3& t = target_position(x->target, ctx);
    return hand_within(latest_valid(w, end, kLeftHandChannel),
                       latest_valid(w, end, kRightHandChannel), t, x->radius_cm);
  }
  const PoseFrame* f = latest_valid(w, end, channel_of(atom));
  return f != nullptr && frame_level(atom, *f, ctx);
}

int count_rising_edges(const Atom& atom, std::span<const PoseFrame> w, Micros now,
                       const EvalContext& ctx) {
  const std::size_t end = upper(w, now);
  const std::string& channel = channel_of(atom);
  const bool hands = std::holds_alternative<HandAt>(atom);
  std::optional<bool> prev;
  int edges = 0;
  for (std::size_t i = 0; i < end; ++i) {
    if (hands) {
      if (!w[i].valid(kLeftHandChannel) && !w[i].valid(kRightHandChannel)) continue;
    } else if (!w[i].valid(channel)) {
      continue;
    }
    bool level;
    if (const auto* r = std::get_if<Rest>(&atom)) {
      level = rest_at(*r, w, w[i].timestamp, ctx);
    } else {
      level = frame_level(atom, w[i], ctx);
    }
    if (prev && !*prev && level) ++edges;
    prev = level;
  }
  return edges;
}

bool eval_predicate(const Predicate& pred, std::span<const PoseFrame> w, Micros now,
                    const EvalContext& ctx) {
  if (const auto* a = std::get_if<Atom>(&pred.node)) return eval_atom(*a, w, now, ctx);
  if (const auto* all = std::get_if<AllOf>(&pred.node)) {
    return std::all_of(all->terms.begin(), all->terms.end(),
                       [&](const Predicate& t) { return eval_predicate(t, w, now, ctx); });
  }
  if (const auto* any = std::get_if<AnyOf>(&pred.node)) {
    return std::any_of(any->terms.begin(), any->terms.end(),
                       [&](const Predicate& t) { return eval_predicate(t, w, now, ctx); });
  }
  if (const auto* h = std::get_if<HoldFor>(&pred.node)) {
    const Micros from = now - from_seconds(h->seconds);
    if (from < ctx.polls.start) return false;
    const long first =
        std::max(1L, static_cast<long>(std::floor(to_seconds(from - ctx.polls.start) * ctx.polls.hz)));
    for (long k = first;; ++k) {
      const Micros p = ctx.polls.instant(k);
      if (p > now) break;
      if (p < from) continue;
      if (!eval_atom(h->atom, w, p, ctx)) return false;
    }
    return eval_atom(h->atom, w, now, ctx);
  }
  const auto& c = std::get<CountOf>(pred.node);
  return count_rising_edges(c.atom, w, now, ctx) >= c.times;
}

}  // namespace rehab::runtime
