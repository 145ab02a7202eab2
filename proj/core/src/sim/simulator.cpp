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
#include "rehab/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rehab/common/vocabulary.hpp"

namespace rehab::sim {

using namespace rehab::dsl;
using runtime::Announcement;
using runtime::Hand;
using runtime::ObjectState;
using runtime::PoseFrame;

namespace {

constexpr double kJointSpeed = 60;     // deg/s at full strength
constexpr double kHandSpeed = 40;      // cm/s at full strength
constexpr double kMinMove = 0.4;       // s
constexpr double kPostHold = 1.0;      // s the completed pose is kept
constexpr double kCrossLead = 5e-7;    // s; boundary crossing precedes the scheduled instant
constexpr double kOutMarginDeg = 5;
constexpr double kPartialRadius = 1.25;
constexpr double kStepOutRadius = 1.5;
constexpr double kFidgetDeg = 6;
constexpr double kFidgetHorizon = 600;  // s of jitter planned for unbounded fidgeting

double secs(Micros t) { return to_seconds(t); }

Micros ceil_micros(double s) {
  return Micros(static_cast<Micros::rep>(std::ceil(s * 1e6 - 1e-6)));
}

bool inside(double v, const Band& b) { return v >= b.min_deg && v <= b.max_deg; }

Vec3 add(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 scale(const Vec3& a, double k) { return {a.x * k, a.y * k, a.z * k}; }

Vec3 unit_from(const Vec3& from, const Vec3& to) {
  const Vec3 d = sub(from, to);
  const double n = runtime::distance(from, to);
  if (n < 1e-9) return {0, -1, 0};
  return scale(d, 1 / n);
}

void collect_atoms(const Predicate& p, std::vector<const Atom*>& out, bool first_any_only) {
  if (const auto* a = std::get_if<Atom>(&p.node)) {
    out.push_back(a);
  } else if (const auto* all = std::get_if<AllOf>(&p.node)) {
    for (const auto& t : all->terms) collect_atoms(t, out, first_any_only);
  } else if (const auto* any = std::get_if<AnyOf>(&p.node)) {
    if (first_any_only) {
      if (!any->terms.empty()) collect_atoms(any->terms.front(), out, first_any_only);
    } else {
      for (const auto& t : any->terms) collect_atoms(t, out, first_any_only);
    }
  } else if (const auto* h = std::get_if<HoldFor>(&p.node)) {
    out.push_back(&h->atom);
  } else if (const auto* c = std::get_if<CountOf>(&p.node)) {
    out.push_back(&c->atom);
  }
}

}  // namespace

Micros frame_instant(long k, double hz) {
  return Micros(static_cast<Micros::rep>(std::llround(static_cast<double>(k) * 1e6 / hz)));
}

double SimulatedPatient::Fidget::at(double t) const {
  if (anchored) {
    if (t >= stop) return b;
    const long k = static_cast<long>(std::ceil((stop - t) / period - 1e-6));
    return (k % 2 == 1) ? a : b;
  }
  const long k = static_cast<long>(std::floor((t - start) / period));
  return (k % 2 == 0) ? b : a;
}

double SimulatedPatient::JointChannel::at(double t) const {
  if (fidget && t >= fidget->start) return fidget->at(t);
  return track.at(t);
}

void SimulatedPatient::JointChannel::freeze(double t) {
  const double v = at(t);
  track = Track<double>(v);
  fidget.reset();
}

// Turns one announcement plus its scripted behavior into channel motions.
class StepPlanner {
 public:
  StepPlanner(SimulatedPatient& sim, Micros at, int step)
      : sim_(sim), a_(at), as_(secs(at)), step_(step), period_(1.0 / sim.options_.hz) {}

  enum class Mode { kComplete, kPartial, kAbsent };

  void plan(const Predicate& p, Mode mode, Micros enter, double fraction) {
    if (const auto* a = std::get_if<Atom>(&p.node)) {
      atom(*a, mode, enter, secs(enter) + kPostHold, fraction);
    } else if (const auto* all = std::get_if<AllOf>(&p.node)) {
      for (const auto& t : all->terms) plan(t, mode, enter, fraction);
    } else if (const auto* any = std::get_if<AnyOf>(&p.node)) {
      for (std::size_t i = 0; i < any->terms.size(); ++i) {
        const Mode m = (mode == Mode::kComplete && i > 0) ? Mode::kAbsent : mode;
        plan(any->terms[i], m, enter, fraction);
      }
    } else if (const auto* h = std::get_if<HoldFor>(&p.node)) {
      hold(*h, mode, enter, fraction);
    } else if (const auto* c = std::get_if<CountOf>(&p.node)) {
      count(*c, mode, enter, fraction);
    }
  }

 private:
  [[noreturn]] void infeasible(const std::string& why) const {
    throw InfeasibleMotion("step " + std::to_string(step_) + ": " + why);
  }

  double speed() const { return sim_.profile_.movement_speed_scale; }

  Band effective(const JointAngle& j) const {
    const Band rom = sim_.profile_.rom(j.joint);
    return {std::max(j.min_deg, rom.min_deg), std::min(j.max_deg, rom.max_deg)};
  }

  double rest_value(const std::string& joint) const {
    const Band rom = sim_.profile_.rom(joint);
    return std::clamp(vocab::find_joint(joint)->rest_deg, rom.min_deg, rom.max_deg);
  }

  // A point outside `band` but inside the ROM, on the side nearest to c.
  double out_point(const std::string& joint, const Band& band, double c) const {
    const Band rom = sim_.profile_.rom(joint);
    const double below_room = band.min_deg - rom.min_deg;
    const double above_room = rom.max_deg - band.max_deg;
    const bool prefer_below = c <= 0.5 * (band.min_deg + band.max_deg);
    auto below = [&] { return band.min_deg - std::min(kOutMarginDeg, below_room * 0.5 + kOutMarginDeg * (below_room >= kOutMarginDeg)); };
    auto above = [&] { return band.max_deg + std::min(kOutMarginDeg, above_room * 0.5 + kOutMarginDeg * (above_room >= kOutMarginDeg)); };
    if (prefer_below && below_room > 1e-6) return below();
    if (above_room > 1e-6) return above();
    if (below_room > 1e-6) return below();
    infeasible("joint '" + joint + "' cannot leave its band within the range of motion");
  }

  Track<Vec3>& hand() { return sim_.hand_track(sim_.profile_.affected_side); }
  Hand side() const { return sim_.profile_.affected_side; }

  const Vec3& target(const std::string& id) const {
    auto it = sim_.targets_.find(id);
    if (it == sim_.targets_.end()) infeasible("target '" + id + "' has no position");
    return it->second;
  }

  SimulatedPatient::ObjectTrack& object(const std::string& id) {
    auto it = sim_.objects_.find(id);
    if (it == sim_.objects_.end()) infeasible("unknown object '" + id + "'");
    return it->second;
  }

  Vec3 object_position(const std::string& id, double t) {
    return sim_.object_state(id, ceil_micros(t)).position;
  }

  void grasp_event(const std::string& id, Micros t) { object(id).events.emplace_back(t, side()); }
  void release_event(const std::string& id, Micros t) { object(id).events.emplace_back(t, Hand::kNone); }

  double joint_duration(double from, double to) const {
    return std::max(kMinMove, std::abs(to - from) / (kJointSpeed * speed()));
  }
  double hand_duration(const Vec3& from, const Vec3& to) const {
    return std::max(kMinMove, runtime::distance(from, to) / (kHandSpeed * speed()));
  }

  // Eased move from c towards g timed so that the fraction f of the path is
  // covered exactly at `cross` (seconds). Returns arrival time at g.
  template <typename V>
  double approach(Track<V>& tr, double earliest, const V& c, const V& g, double f, double cross,
                  double natural) {
    if (cross <= earliest) {
      tr.jump(earliest, g);
      return earliest;
    }
    const double tau = smoothstep_inverse(f);
    const double t0 = std::max(earliest, cross - tau * natural);
    const double dur = (cross - t0) / tau;
    tr.move(t0, t0 + dur, g);
    (void)c;
    return t0 + dur;
  }

  // ---- joint angle ------------------------------------------------------

  void joint_complete(const JointAngle& j, Micros enter, double stay_until, bool settle_out) {
    const Band band = effective(j);
    if (!(band.min_deg <= band.max_deg)) {
      infeasible("band [" + std::to_string(j.min_deg) + ", " + std::to_string(j.max_deg) +
                 "] of '" + j.joint + "' lies outside the range of motion");
    }
    auto& ch = sim_.joints_.at(j.joint);
    double c = ch.at(as_);
    if (inside(c, band)) {
      c = out_point(j.joint, band, c);
      ch.track.jump(as_, c);
    }
    const double g = 0.5 * (band.min_deg + band.max_deg);
    const double b = c < band.min_deg ? band.min_deg : band.max_deg;
    const double f = (b - c) / (g - c);
    const double arrive =
        approach(ch.track, as_, c, g, f, secs(enter) - kCrossLead, joint_duration(c, g));
    const double leave = std::max(stay_until, arrive);
    const double dest = settle_out ? out_point(j.joint, band, c) : rest_value(j.joint);
    ch.track.move(leave, leave + joint_duration(g, dest), dest);
  }

  void joint_partial(const JointAngle& j, double fraction) {
    const Band band = effective(j);
    auto& ch = sim_.joints_.at(j.joint);
    double c = ch.at(as_);
    if (inside(c, band)) {
      if (!(band.min_deg <= band.max_deg)) return;
      c = out_point(j.joint, band, c);
      ch.track.jump(as_, c);
    }
    if (!(band.min_deg <= band.max_deg)) {
      // Band unreachable: push towards it and plateau at the ROM limit.
      const Band rom = sim_.profile_.rom(j.joint);
      const double stop = j.min_deg > rom.max_deg ? rom.max_deg : rom.min_deg;
      ch.track.move(as_, as_ + joint_duration(c, stop), stop);
      return;
    }
    const double b = c < band.min_deg ? band.min_deg : band.max_deg;
    const double dir = c < b ? 1.0 : -1.0;
    const Band rom = sim_.profile_.rom(j.joint);
    double stop = b - dir * std::max(kOutMarginDeg, std::abs(b - c) * (1 - fraction));
    stop = std::clamp(stop, rom.min_deg, rom.max_deg);
    if (inside(stop, band)) stop = c;
    ch.track.move(as_, as_ + joint_duration(c, stop), stop);
  }

  void joint_absent(const JointAngle& j) {
    const Band band = effective(j);
    if (!(band.min_deg <= band.max_deg)) return;
    auto& ch = sim_.joints_.at(j.joint);
    const double c = ch.at(as_);
    if (inside(c, band)) ch.track.jump(as_, out_point(j.joint, band, c));
  }

  // ---- hand / object position --------------------------------------------

  // Moves the affected hand so its distance to g first drops to r at `enter`.
  double reach(const Vec3& g, double r, Micros enter, double earliest) {
    Track<Vec3>& h = hand();
    Vec3 p = h.at(earliest);
    double d0 = runtime::distance(p, g);
    if (d0 <= r) {
      p = add(g, scale(unit_from(p, g), kStepOutRadius * r));
      h.jump(earliest, p);
      d0 = kStepOutRadius * r;
    }
    return approach(h, earliest, p, g, 1 - r / d0, secs(enter) - kCrossLead, hand_duration(p, g));
  }

  void reach_partial(const Vec3& g, double r, double fraction, double earliest) {
    Track<Vec3>& h = hand();
    Vec3 p = h.at(earliest);
    double d0 = runtime::distance(p, g);
    const Vec3 dir = unit_from(p, g);
    if (d0 <= kPartialRadius * r) {
      if (d0 <= r) h.jump(earliest, add(g, scale(dir, kPartialRadius * r)));
      return;
    }
    const double stop = std::max(kPartialRadius * r, d0 * (1 - fraction));
    const Vec3 q = add(g, scale(dir, stop));
    h.move(earliest, earliest + hand_duration(p, q), q);
  }

  void hand_home(double from) {
    Track<Vec3>& h = hand();
    const Vec3 home = side() == Hand::kRight ? kRightHandHome : kLeftHandHome;
    const Vec3 p = h.at(from);
    h.move(from, from + hand_duration(p, home), home);
  }

  // Brings the hand to the object and grasps it at `when` (unless held).
  void fetch(const std::string& id, Micros when) {
    auto& obj = object(id);
    if (obj.held == side()) return;
    const Vec3 at = object_position(id, as_);
    Track<Vec3>& h = hand();
    const double w = secs(when);
    const Vec3 p = h.at(as_);
    const double t0 = std::max(as_, w - hand_duration(p, at));
    h.move(t0, w, at);
    grasp_event(id, when);
  }

  bool hand_satisfies(const HandAt& x) {
    const Vec3& g = target(x.target);
    return runtime::distance(hand().at(as_), g) <= x.radius_cm;
  }

  // ---- atoms -------------------------------------------------------------

  void atom(const Atom& a, Mode mode, Micros enter, double stay_until, double fraction,
            bool settle_out = false) {
    if (const auto* x = std::get_if<JointAngle>(&a)) {
      if (mode == Mode::kComplete) joint_complete(*x, enter, stay_until, settle_out);
      if (mode == Mode::kPartial) joint_partial(*x, fraction);
      if (mode == Mode::kAbsent) joint_absent(*x);
    } else if (const auto* x = std::get_if<HandAt>(&a)) {
      const Vec3& g = target(x->target);
      if (mode == Mode::kComplete) {
        const double arrive = reach(g, x->radius_cm, enter, as_);
        const double leave = std::max(stay_until, arrive);
        if (settle_out) {
          Track<Vec3>& h = hand();
          const Vec3 out = add(g, scale(unit_from(h.at(as_), g), kPartialRadius * x->radius_cm));
          h.move(leave, leave + hand_duration(g, out), out);
        } else {
          hand_home(leave);
        }
      } else if (mode == Mode::kPartial) {
        reach_partial(g, x->radius_cm, fraction, as_);
      } else if (hand_satisfies(*x)) {
        hand().jump(as_, add(g, scale(unit_from(hand().at(as_), g), kStepOutRadius * x->radius_cm)));
      }
    } else if (const auto* x = std::get_if<ObjectAt>(&a)) {
      object_at(*x, mode, enter, stay_until, fraction, settle_out);
    } else if (const auto* x = std::get_if<Grasp>(&a)) {
      grasp(*x, mode, enter, stay_until, fraction);
    } else if (const auto* x = std::get_if<Release>(&a)) {
      release(*x, mode, enter, fraction);
    } else if (const auto* x = std::get_if<Rest>(&a)) {
      rest(*x, mode, enter);
    }
  }

  void object_at(const ObjectAt& x, Mode mode, Micros enter, double stay_until, double fraction,
                 bool settle_out) {
    const Vec3& g = target(x.target);
    auto& obj = object(x.object);
    const Vec3 pos = object_position(x.object, as_);
    if (runtime::distance(pos, g) <= x.radius_cm) {
      const Vec3 out = add(g, scale(unit_from(pos, g), kStepOutRadius * x.radius_cm));
      if (obj.held == side()) {
        hand().jump(as_, out);
      } else {
        obj.base = out;
        obj.events.clear();
        if (obj.held != Hand::kNone) release_event(x.object, a_);
      }
    }
    if (mode == Mode::kAbsent) return;
    double earliest = as_;
    if (obj.held != side()) {
      const double span = (mode == Mode::kComplete ? secs(enter) : as_ + 2.0) - as_;
      const Micros when = ceil_micros(as_ + std::max(0.0, 0.4 * span));
      fetch(x.object, when);
      earliest = secs(when);
    }
    if (mode == Mode::kPartial) {
      reach_partial(g, x.radius_cm, fraction, earliest);
      return;
    }
    const double arrive = reach(g, x.radius_cm, enter, earliest);
    const double leave = std::max(stay_until, arrive);
    if (settle_out) {
      Track<Vec3>& h = hand();
      const Vec3 out = add(g, scale(unit_from(pos, g), kPartialRadius * x.radius_cm));
      h.move(leave, leave + hand_duration(g, out), out);
      return;
    }
    release_event(x.object, ceil_micros(leave));
    hand_home(leave);
  }

  void grasp(const Grasp& x, Mode mode, Micros enter, double stay_until, double fraction) {
    auto& obj = object(x.object);
    if (mode == Mode::kAbsent) return;
    if (obj.held != Hand::kNone) release_event(x.object, a_);
    const Vec3 at = object_position(x.object, as_);
    Track<Vec3>& h = hand();
    const Vec3 p = h.at(as_);
    if (mode == Mode::kPartial) {
      const double d0 = runtime::distance(p, at);
      const Vec3 q = add(at, scale(unit_from(p, at), std::max(2.0, d0 * (1 - fraction))));
      h.move(as_, as_ + hand_duration(p, q), q);
      return;
    }
    const double w = std::max(secs(enter), as_);
    const double t0 = std::max(as_, w - hand_duration(p, at));
    h.move(t0, w, at);
    grasp_event(x.object, std::max(enter, a_));
    hand_home(std::max(stay_until, w));
  }

  void release(const Release& x, Mode mode, Micros enter, double fraction) {
    auto& obj = object(x.object);
    if (mode == Mode::kAbsent) return;
    (void)fraction;
    const Micros min_gap = frame_instant(2, sim_.options_.hz);
    if (obj.held == Hand::kNone) {
      if (mode == Mode::kComplete && enter - a_ < min_gap) {
        infeasible("release of '" + x.object + "' needs time to pick the object up first");
      }
      const Micros when = mode == Mode::kComplete ? a_ + (enter - a_) / 2
                                                  : a_ + from_seconds(1.0);
      fetch(x.object, when);
    }
    if (mode == Mode::kPartial) return;  // keeps holding
    release_event(x.object, std::max(enter, a_));
    hand_home(std::max(secs(enter), as_) + kPostHold);
  }

  void rest(const Rest& x, Mode mode, Micros enter) {
    auto& ch = sim_.joints_.at(x.joint);
    const Band rom = sim_.profile_.rom(x.joint);
    const double c = ch.at(as_);
    double sigma = 1;
    if (c + kFidgetDeg > rom.max_deg) sigma = -1;
    if (c + sigma * kFidgetDeg < rom.min_deg) infeasible("range of motion too narrow to fidget");
    SimulatedPatient::Fidget f;
    f.start = as_;
    f.period = period_;
    f.a = c;
    f.b = c + sigma * kFidgetDeg;
    if (mode == Mode::kComplete) {
      const Micros freeze = enter - from_seconds(x.seconds);
      if (freeze < a_) infeasible("rest needs " + std::to_string(x.seconds) + " s of stillness");
      f.anchored = true;
      f.stop = secs(freeze);
    } else {
      f.stop = as_ + kFidgetHorizon;
    }
    ch.fidget = f;
  }

  void hold(const HoldFor& h, Mode mode, Micros enter, double fraction) {
    const bool edge = std::holds_alternative<Grasp>(h.atom) || std::holds_alternative<Release>(h.atom);
    if (mode == Mode::kComplete) {
      const Micros start = enter - from_seconds(h.seconds);
      if (start < a_) infeasible("hold of " + std::to_string(h.seconds) + " s cannot finish in time");
      atom(h.atom, mode, start, secs(enter) + kPostHold, fraction);
      return;
    }
    if (mode == Mode::kPartial && !edge && !std::holds_alternative<Rest>(h.atom)) {
      const Micros start = a_ + from_seconds(1.0);
      const double stay = secs(start) + std::max(0.0, fraction * h.seconds - 2 * period_);
      atom(h.atom, Mode::kComplete, start, stay, fraction, /*settle_out=*/true);
      return;
    }
    atom(h.atom, mode == Mode::kPartial && edge ? Mode::kPartial : mode, enter, 0, fraction);
  }

  // ---- count -------------------------------------------------------------

  void count(const CountOf& c, Mode mode, Micros enter, double fraction) {
    if (std::holds_alternative<Rest>(c.atom)) infeasible("count over rest is not supported");
    if (mode == Mode::kAbsent) {
      atom(c.atom, Mode::kAbsent, enter, 0, fraction);
      return;
    }
    int cycles = c.times;
    double last;
    double cycle = std::max(1.0, 4 * period_);
    if (mode == Mode::kComplete) {
      last = secs(enter);
    } else {
      cycles = std::min(c.times - 1, static_cast<int>(std::floor(c.times * fraction)));
      if (cycles <= 0) {
        atom(c.atom, Mode::kPartial, enter, 0, fraction);
        return;
      }
      last = as_ + 1.0 + cycle * (cycles - 1);
    }
    if (cycles > 1 && last - cycle * (cycles - 1) < as_ + 0.5) {
      cycle = (last - as_ - 0.5) / (cycles - 1);
      if (cycle < 4 * period_) infeasible("not enough time for " + std::to_string(c.times) + " repetitions");
    }
    std::vector<Micros> entries;
    for (int i = 0; i < cycles; ++i) {
      entries.push_back(ceil_micros(last - cycle * (cycles - 1 - i)));
    }
    if (mode == Mode::kComplete) entries.back() = enter;
    const bool settle_out = mode == Mode::kPartial;
    if (const auto* x = std::get_if<JointAngle>(&c.atom)) {
      count_joint(*x, entries, cycle, settle_out);
    } else if (const auto* x = std::get_if<HandAt>(&c.atom)) {
      count_position(target(x->target), x->radius_cm, entries, cycle, settle_out, nullptr);
    } else if (const auto* x = std::get_if<ObjectAt>(&c.atom)) {
      auto& obj = object(x->object);
      const double earliest = secs(entries.front()) - cycle / 2;
      if (obj.held != side()) {
        if (earliest < as_ + period_) infeasible("no time to pick up '" + x->object + "'");
        fetch(x->object, ceil_micros(std::max(as_ + period_, earliest - 1.0)));
      }
      count_position(target(x->target), x->radius_cm, entries, cycle, settle_out, &x->object);
    } else if (const auto* x = std::get_if<Grasp>(&c.atom)) {
      auto& obj = object(x->object);
      if (obj.held != Hand::kNone) release_event(x->object, a_);
      const Vec3 at = object_position(x->object, as_);
      Track<Vec3>& h = hand();
      const double w = secs(entries.front());
      h.move(std::max(as_, w - hand_duration(h.at(as_), at)), w, at);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        grasp_event(x->object, entries[i]);
        if (i + 1 < entries.size()) release_event(x->object, ceil_micros(secs(entries[i]) + cycle / 2));
      }
    } else if (const auto* x = std::get_if<Release>(&c.atom)) {
      auto& obj = object(x->object);
      const double first_grasp = secs(entries.front()) - cycle / 2;
      if (obj.held == Hand::kNone) {
        if (first_grasp < as_ + period_) infeasible("no time to pick up '" + x->object + "'");
        fetch(x->object, ceil_micros(first_grasp));
      }
      for (std::size_t i = 0; i < entries.size(); ++i) {
        release_event(x->object, entries[i]);
        if (i + 1 < entries.size()) grasp_event(x->object, ceil_micros(secs(entries[i]) + cycle / 2));
      }
    }
  }

  void count_joint(const JointAngle& j, const std::vector<Micros>& entries, double cycle,
                   bool settle_out) {
    const Band band = effective(j);
    if (!(band.min_deg <= band.max_deg)) infeasible("band of '" + j.joint + "' outside ROM");
    auto& ch = sim_.joints_.at(j.joint);
    double c = ch.at(as_);
    if (inside(c, band)) {
      c = out_point(j.joint, band, c);
      ch.track.jump(as_, c);
    }
    const double in = 0.5 * (band.min_deg + band.max_deg);
    const double out = out_point(j.joint, band, c);
    const double b_first = c < band.min_deg ? band.min_deg : band.max_deg;
    approach(ch.track, as_, c, in, (b_first - c) / (in - c), secs(entries.front()) - kCrossLead,
             joint_duration(c, in));
    const double b = out < band.min_deg ? band.min_deg : band.max_deg;
    const double phi = (b - out) / (in - out);
    const double leg = cycle / 4;
    for (std::size_t i = 1; i < entries.size(); ++i) {
      const double prev = secs(entries[i - 1]);
      ch.track.move(prev + leg, prev + 2 * leg, out, false);
      const double ta = secs(entries[i]) - kCrossLead - phi * leg;
      ch.track.move(ta, ta + leg, in, false);
    }
    const double done = secs(entries.back()) + (settle_out ? leg : kPostHold);
    const double dest = settle_out ? out : rest_value(j.joint);
    ch.track.move(done, done + joint_duration(in, dest), dest);
  }

  void count_position(const Vec3& g, double r, const std::vector<Micros>& entries, double cycle,
                      bool settle_out, const std::string* carried) {
    Track<Vec3>& h = hand();
    const double start = std::max(as_, secs(entries.front()) - cycle / 2);
    const Vec3 p = h.at(start);
    const Vec3 out = add(g, scale(unit_from(p, g), kStepOutRadius * r));
    reach(g, r, entries.front(), start);
    const double phi = 1 - 1 / kStepOutRadius;
    const double leg = cycle / 4;
    for (std::size_t i = 1; i < entries.size(); ++i) {
      const double prev = secs(entries[i - 1]);
      h.move(prev + leg, prev + 2 * leg, out, false);
      const double ta = secs(entries[i]) - kCrossLead - phi * leg;
      h.move(ta, ta + leg, g, false);
    }
    const double done = secs(entries.back()) + (settle_out ? leg : kPostHold);
    if (settle_out) {
      h.move(done, done + leg, out, false);
      return;
    }
    if (carried) release_event(*carried, ceil_micros(done));
    hand_home(done);
  }

  SimulatedPatient& sim_;
  Micros a_;
  double as_;
  int step_;
  double period_;
};

// ---- SimulatedPatient -----------------------------------------------------

SimulatedPatient::SimulatedPatient(const InterventionProgram& program, PatientProfile profile,
                                   BehaviorScript script, NoiseModel noise, SimOptions options)
    : program_(program),
      profile_(std::move(profile)),
      script_(std::move(script)),
      noise_(noise),
      options_(options),
      noise_rng_(noise.seed),
      dropout_rng_(noise.seed ^ 0x9e3779b97f4a7c15ULL) {
  profile_.validate();
  noise_.validate();
  if (!(options_.hz >= 1 && options_.hz <= 60)) throw std::invalid_argument("hz must lie in [1, 60]");
  for (const auto& step : program_.steps) {
    if (!step.monitored()) continue;
    auto it = script_.steps.find(step.index);
    if (it == script_.steps.end()) {
      throw ScriptError("behavior script has no entry for monitored step " + std::to_string(step.index));
    }
    const Behavior& b = it->second;
    if (b.kind != Behavior::Kind::kCompleteAt) continue;
    std::vector<const Atom*> atoms;
    collect_atoms(step.expect->predicate, atoms, true);
    for (const Atom* a : atoms) {
      if (const auto* j = std::get_if<JointAngle>(a)) {
        const Band rom = profile_.rom(j->joint);
        if (std::max(j->min_deg, rom.min_deg) > std::min(j->max_deg, rom.max_deg)) {
          throw InfeasibleMotion("step " + std::to_string(step.index) + ": band [" +
                                 std::to_string(j->min_deg) + ", " + std::to_string(j->max_deg) +
                                 "] of '" + j->joint + "' lies outside the range of motion");
        }
      }
    }
  }
  for (const auto& spec : vocab::canonical_joints()) {
    const Band rom = profile_.rom(spec.name);
    joints_[spec.name].track = Track<double>(std::clamp(spec.rest_deg, rom.min_deg, rom.max_deg));
  }
  left_ = Track<Vec3>(kLeftHandHome);
  right_ = Track<Vec3>(kRightHandHome);
  int slot = 0;
  for (const auto& d : program_.scene) {
    const Vec3 fallback{-40.0 + 20.0 * (slot % 5), 60.0 + 20.0 * (slot / 5), 0};
    ++slot;
    if (d.kind == SceneKind::kObject) objects_[d.id].base = d.position.value_or(fallback);
    if (d.kind == SceneKind::kTarget) targets_[d.id] = d.position.value_or(fallback);
  }
}

Track<Vec3>& SimulatedPatient::hand_track(Hand h) { return h == Hand::kLeft ? left_ : right_; }
const Track<Vec3>& SimulatedPatient::hand_track(Hand h) const {
  return h == Hand::kLeft ? left_ : right_;
}

ObjectState SimulatedPatient::object_state(const std::string& id, Micros t) const {
  const ObjectTrack& o = objects_.at(id);
  Vec3 base = o.base;
  Hand held = o.held;
  for (const auto& [when, hand] : o.events) {
    if (when > t) break;
    if (hand == Hand::kNone) {
      if (held != Hand::kNone) base = hand_track(held).at(secs(when));
    } else if (held != Hand::kNone && held != hand) {
      base = hand_track(held).at(secs(when));
    }
    held = hand;
  }
  ObjectState s;
  s.held_by = held;
  s.position = held == Hand::kNone ? base : hand_track(held).at(secs(t));
  return s;
}

void SimulatedPatient::bake_objects(Micros t) {
  for (auto& [id, o] : objects_) {
    std::stable_sort(o.events.begin(), o.events.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    const ObjectState s = object_state(id, t);
    o.base = s.position;
    o.held = s.held_by;
    o.events.clear();
  }
}

void SimulatedPatient::on_announce(const Announcement& a) {
  if (a.fallback) {
    active_ = a.expectation;
    return;
  }
  bake_objects(a.at);
  const double t = secs(a.at);
  for (auto& [name, ch] : joints_) ch.freeze(t);
  left_.freeze(t);
  right_.freeze(t);
  active_ = a.expectation;
  if (a.expectation == nullptr) return;

  const Behavior& b = script_.steps.at(a.step_index);
  StepPlanner planner(*this, a.at, a.step_index);
  switch (b.kind) {
    case Behavior::Kind::kCompleteAt: {
      const Micros enter = a.at + from_seconds(b.offset_s);
      truth_[a.step_index] = enter;
      planner.plan(a.expectation->predicate, StepPlanner::Mode::kComplete, enter, 0);
      break;
    }
    case Behavior::Kind::kPartialAttempt:
      truth_[a.step_index] = std::nullopt;
      planner.plan(a.expectation->predicate, StepPlanner::Mode::kPartial, a.at, b.fraction);
      break;
    case Behavior::Kind::kNoAttempt:
      truth_[a.step_index] = std::nullopt;
      planner.plan(a.expectation->predicate, StepPlanner::Mode::kAbsent, a.at, 0);
      break;
  }
  for (auto& [id, o] : objects_) {
    std::stable_sort(o.events.begin(), o.events.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
  }
}

PoseFrame SimulatedPatient::sample(Micros t) const {
  PoseFrame f;
  f.timestamp = t;
  const double ts = secs(t);
  for (const auto& [name, ch] : joints_) {
    const Band rom = profile_.rom(name);
    f.joint_angles[name] = std::clamp(ch.at(ts), rom.min_deg, rom.max_deg);
  }
  f.left_hand = left_.at(ts);
  f.right_hand = right_.at(ts);
  for (const auto& [id, o] : objects_) f.objects[id] = object_state(id, t);
  return f;
}

namespace {

// Frame-local truth of a predicate, used to decide which noise applies.
bool frame_satisfies(const Predicate& p, const PoseFrame& f, const PoseFrame* prev,
                     const std::map<std::string, Vec3>& targets, const PatientProfile& profile);

bool atom_level(const Atom& a, const PoseFrame& f, const PoseFrame* prev,
                const std::map<std::string, Vec3>& targets) {
  if (const auto* x = std::get_if<JointAngle>(&a)) {
    const double v = f.joint_angles.at(x->joint);
    return v >= x->min_deg && v <= x->max_deg;
  }
  if (const auto* x = std::get_if<HandAt>(&a)) {
    auto it = targets.find(x->target);
    if (it == targets.end()) return false;
    return runtime::distance(f.left_hand, it->second) <= x->radius_cm ||
           runtime::distance(f.right_hand, it->second) <= x->radius_cm;
  }
  if (const auto* x = std::get_if<Grasp>(&a)) return f.objects.at(x->object).held_by != Hand::kNone;
  if (const auto* x = std::get_if<Release>(&a)) return f.objects.at(x->object).held_by == Hand::kNone;
  if (const auto* x = std::get_if<ObjectAt>(&a)) {
    auto it = targets.find(x->target);
    if (it == targets.end()) return false;
    return runtime::distance(f.objects.at(x->object).position, it->second) <= x->radius_cm;
  }
  if (const auto* x = std::get_if<Rest>(&a)) {
    return prev != nullptr && prev->joint_angles.at(x->joint) == f.joint_angles.at(x->joint);
  }
  return false;
}

bool frame_satisfies(const Predicate& p, const PoseFrame& f, const PoseFrame* prev,
                     const std::map<std::string, Vec3>& targets, const PatientProfile& profile) {
  if (const auto* a = std::get_if<Atom>(&p.node)) return atom_level(*a, f, prev, targets);
  if (const auto* all = std::get_if<AllOf>(&p.node)) {
    return std::all_of(all->terms.begin(), all->terms.end(), [&](const Predicate& t) {
      return frame_satisfies(t, f, prev, targets, profile);
    });
  }
  if (const auto* any = std::get_if<AnyOf>(&p.node)) {
    return std::any_of(any->terms.begin(), any->terms.end(), [&](const Predicate& t) {
      return frame_satisfies(t, f, prev, targets, profile);
    });
  }
  if (const auto* h = std::get_if<HoldFor>(&p.node)) return atom_level(h->atom, f, prev, targets);
  return atom_level(std::get<CountOf>(p.node).atom, f, prev, targets);
}

}  // namespace

void SimulatedPatient::apply_noise(PoseFrame& f) {
  if (active_ == nullptr) return;
  const PoseFrame truth = f;
  const PoseFrame* prev = last_true_ ? &*last_true_ : nullptr;
  const bool satisfied = frame_satisfies(active_->predicate, truth, prev, targets_, profile_);
  std::vector<const Atom*> atoms;
  collect_atoms(active_->predicate, atoms, /*first_any_only=*/true);
  const double u = noise_rng_.uniform();
  if (satisfied) {
    ++stats_.fn_opportunities;
    if (u < noise_.fn_rate && last_unsatisfied_) {
      ++stats_.fn_injected;
      const PoseFrame& src = *last_unsatisfied_;
      for (const Atom* a : atoms) {
        if (const auto* x = std::get_if<JointAngle>(a)) f.joint_angles[x->joint] = src.joint_angles.at(x->joint);
        if (const auto* x = std::get_if<Rest>(a)) f.joint_angles[x->joint] = src.joint_angles.at(x->joint);
        if (std::holds_alternative<HandAt>(*a)) {
          f.left_hand = src.left_hand;
          f.right_hand = src.right_hand;
        }
        if (const auto* x = std::get_if<ObjectAt>(a)) f.objects[x->object] = src.objects.at(x->object);
        if (const auto* x = std::get_if<Grasp>(a)) f.objects[x->object] = src.objects.at(x->object);
        if (const auto* x = std::get_if<Release>(a)) f.objects[x->object] = src.objects.at(x->object);
      }
    }
  } else {
    ++stats_.fp_opportunities;
    if (u < noise_.fp_rate) {
      ++stats_.fp_injected;
      for (const Atom* a : atoms) {
        if (const auto* x = std::get_if<JointAngle>(a)) {
          const Band rom = profile_.rom(x->joint);
          f.joint_angles[x->joint] =
              std::clamp(0.5 * (x->min_deg + x->max_deg), rom.min_deg, rom.max_deg);
        } else if (const auto* x = std::get_if<HandAt>(a)) {
          if (auto it = targets_.find(x->target); it != targets_.end()) {
            (profile_.affected_side == Hand::kLeft ? f.left_hand : f.right_hand) = it->second;
          }
        } else if (const auto* x = std::get_if<ObjectAt>(a)) {
          if (auto it = targets_.find(x->target); it != targets_.end()) {
            f.objects[x->object].position = it->second;
          }
        } else if (const auto* x = std::get_if<Grasp>(a)) {
          f.objects[x->object].held_by = profile_.affected_side;
        } else if (const auto* x = std::get_if<Release>(a)) {
          f.objects[x->object].held_by = Hand::kNone;
        } else if (const auto* x = std::get_if<Rest>(a)) {
          if (last_emitted_) f.joint_angles[x->joint] = last_emitted_->joint_angles.at(x->joint);
        }
      }
    }
  }
  if (!satisfied) last_unsatisfied_ = truth;
}

void SimulatedPatient::apply_dropout(PoseFrame& f) {
  if (noise_.dropout_rate <= 0) return;
  auto draw = [&](const std::string& channel) {
    ++stats_.channel_samples;
    if (dropout_rng_.bernoulli(noise_.dropout_rate)) {
      ++stats_.channels_dropped;
      f.validity[channel] = false;
    }
  };
  for (const auto& [name, v] : f.joint_angles) draw(name);
  draw(runtime::kLeftHandChannel);
  draw(runtime::kRightHandChannel);
  for (const auto& [id, o] : f.objects) draw(id);
}

bool SimulatedPatient::pull_until(Micros t, std::vector<PoseFrame>& out) {
  const Micros limit = options_.horizon ? std::min(t, *options_.horizon) : t;
  for (;;) {
    const Micros ft = frame_instant(next_frame_, options_.hz);
    if (ft > limit) break;
    PoseFrame f = sample(ft);
    const PoseFrame truth = f;
    apply_noise(f);
    apply_dropout(f);
    last_true_ = truth;
    last_emitted_ = f;
    if (options_.record) recorded_.push_back(f);
    out.push_back(std::move(f));
    ++next_frame_;
  }
  return !options_.horizon || t <= *options_.horizon;
}

std::optional<Micros> SimulatedPatient::truth(int step_index) const {
  auto it = truth_.find(step_index);
  return it == truth_.end() ? std::nullopt : it->second;
}

runtime::GroundTruthTimes SimulatedPatient::truth_for(const runtime::SessionLog& log) const {
  runtime::GroundTruthTimes out;
  out.reserve(log.steps.size());
  for (const auto& s : log.steps) out.push_back(s.monitored ? truth(s.index) : std::nullopt);
  return out;
}

SimulationResult simulate(const InterventionProgram& program, const PatientProfile& profile,
                          const BehaviorScript& script, const NoiseModel& noise, double hz,
                          double poll_hz) {
  SimOptions opts;
  opts.hz = hz;
  opts.record = true;
  SimulatedPatient patient(program, profile, script, noise, opts);
  VirtualClock clock;
  runtime::SessionConfig cfg;
  cfg.poll_hz = poll_hz;
  cfg.program_id = program.name;
  cfg.seed = noise.seed;
  SimulationResult r;
  r.log = runtime::run_session(program, patient, clock, cfg);
  r.truth = patient.truth_for(r.log);
  r.frames = patient.recorded();
  r.noise = patient.noise_stats();
  return r;
}

}  // namespace rehab::sim
