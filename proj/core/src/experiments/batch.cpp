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
#include "rehab/experiments/batch.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "rehab/common/rng.hpp"
#include "rehab/common/vocabulary.hpp"
#include "rehab/genpipe/template_generator.hpp"

namespace rehab::experiments {

using dsl::InterventionProgram;

namespace {

// Noise streams of different sessions must not overlap.
std::uint64_t session_seed(std::uint64_t seed, std::size_t i) {
  return seed * 1000003ULL + 7919ULL * (i + 1);
}

std::set<std::string> declared_joints(const InterventionProgram& p) {
  std::set<std::string> out;
  for (const auto& d : p.scene) {
    if (d.kind == dsl::SceneKind::kJoint) out.insert(d.id);
  }
  return out;
}

// Keeps the steps up to and including the `monitored`-th monitored one.
void truncate_to_monitored(genpipe::Prescription& rx, InterventionProgram& p, int monitored) {
  int seen = 0;
  std::size_t keep = 0;
  for (; keep < p.steps.size(); ++keep) {
    if (p.steps[keep].monitored() && ++seen == monitored) {
      ++keep;
      break;
    }
  }
  p.steps.resize(keep);
  rx.steps.resize(keep);
}

}  // namespace

std::string inject_hallucinated_atom(InterventionProgram& p, const genpipe::Prescription& rx,
                                     int step_index, const sim::PatientProfile& profile) {
  auto& step = p.steps.at(static_cast<std::size_t>(step_index - 1));
  if (!step.expect) throw std::invalid_argument("step " + std::to_string(step_index) + " is not monitored");
  auto used = declared_joints(p);
  const auto v = genpipe::global_vocabulary(rx);
  std::string joint;
  for (const auto& j : vocab::canonical_joints()) {
    if (v.joints.count(j.name)) continue;
    const auto rom = profile.rom(j.name);
    if (rom.min_deg > 10 || rom.max_deg < 40) continue;
    // Prefer joints the program does not declare yet.
    if (used.count(j.name)) {
      if (joint.empty()) joint = j.name;
      continue;
    }
    joint = j.name;
    break;
  }
  if (joint.empty()) throw std::invalid_argument("no joint left to hallucinate");
  bool declared_in_rx = false;
  for (const auto& s : rx.steps) declared_in_rx = declared_in_rx || s.entities.joints.count(joint);
  if (declared_in_rx) throw std::logic_error("hallucinated joint is prescribed");

  dsl::Predicate extra = dsl::Atom{dsl::JointAngle{joint, 10, 40}};
  auto& pred = step.expect->predicate;
  if (auto* all = std::get_if<dsl::AllOf>(&pred.node)) {
    all->terms.push_back(std::move(extra));
  } else {
    pred = dsl::AllOf{{std::move(pred), std::move(extra)}};
  }
  if (!used.count(joint)) {
    dsl::SceneDecl d;
    d.kind = dsl::SceneKind::kJoint;
    d.id = joint;
    p.scene.push_back(std::move(d));
  }
  return joint;
}

BatchResult run_batch(const std::vector<genpipe::Prescription>& worksheets, const BatchConfig& config) {
  if (worksheets.empty()) throw std::invalid_argument("batch needs at least one worksheet");
  if (config.monitored_steps < 1) throw std::invalid_argument("batch needs at least one monitored step");
  if (config.hallucinated_steps < 0 || config.hallucinated_steps > config.monitored_steps) {
    throw std::invalid_argument("hallucinated step count out of range");
  }
  BatchResult r;
  r.config = config;

  // Session layout.
  std::vector<InterventionProgram> programs;
  for (const auto& rx : worksheets) {
    programs.push_back(genpipe::translate_prescription(rx));
    if (programs.back().monitored_step_count() == 0) {
      throw std::invalid_argument("worksheet " + rx.id + " has no monitored step");
    }
  }
  std::vector<StepRef> slots;
  int remaining = config.monitored_steps;
  for (std::size_t k = 0; remaining > 0; ++k) {
    const std::size_t w = k % worksheets.size();
    BatchSession s;
    char id[64];
    std::snprintf(id, sizeof id, "s%03zu-%s", k + 1, worksheets[w].id.c_str());
    s.id = id;
    s.rx = worksheets[w];
    s.program = programs[w];
    const int m = s.program.monitored_step_count();
    if (m > remaining) truncate_to_monitored(s.rx, s.program, remaining);
    s.noise_seed = session_seed(config.seed, k);
    for (const auto& step : s.program.steps) {
      if (step.monitored()) slots.emplace_back(s.id, step.index);
    }
    remaining -= std::min(m, remaining);
    r.sessions.push_back(std::move(s));
  }

  std::map<std::string, BatchSession*> by_id;
  for (auto& s : r.sessions) by_id[s.id] = &s;

  // Behaviors and labels.
  const auto mix = sim::make_prelabel_mix(config.monitored_steps, config.incomplete_fraction, config.seed);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& [sid, step] = slots[i];
    by_id[sid]->script.steps[step] = mix.behaviors[i];
    stats::PreLabel l = mix.labels[i];
    l.session_id = sid;
    l.step_index = step;
    r.labels.push_back(l);
  }

  // Hallucinated atoms on distinct slots.
  if (config.hallucinated_steps > 0) {
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(slots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int i = 0; i < config.hallucinated_steps; ++i) {
      const std::size_t j = i + rng.below(order.size() - i);
      std::swap(order[i], order[j]);
      const auto& [sid, step] = slots[order[i]];
      auto& s = *by_id[sid];
      inject_hallucinated_atom(s.program, s.rx, step, config.profile);
      s.seeded_steps.push_back(step);
      r.seeded.insert(slots[order[i]]);
    }
  }

  // Simulate and evaluate.
  std::vector<std::string> ids;
  std::vector<runtime::SessionLog> logs;
  for (auto& s : r.sessions) {
    s.findings = genpipe::detect_hallucinated_monitors(s.rx, s.program);
    for (const auto& f : s.findings) r.flagged.emplace(s.id, f.step_index);
    const sim::NoiseModel noise{config.fp_rate, config.fn_rate, config.dropout_rate, s.noise_seed};
    s.result = sim::simulate(s.program, config.profile, s.script, noise, config.hz, config.poll_hz);
    s.result.frames.clear();
    s.result.frames.shrink_to_fit();
    const auto verdicts = runtime::pacing_of(s.result.log, s.result.truth, config.pacing);
    for (std::size_t i = 0; i < s.result.log.steps.size(); ++i) {
      const auto& rec = s.result.log.steps[i];
      if (!rec.monitored) continue;
      r.pacing.push_back(verdicts[i]);
      if (runtime::is_false_positive_detection(rec, s.result.truth[i])) ++r.false_positive_detections;
    }
    const auto& n = s.result.noise;
    r.noise.fp_opportunities += n.fp_opportunities;
    r.noise.fp_injected += n.fp_injected;
    r.noise.fn_opportunities += n.fn_opportunities;
    r.noise.fn_injected += n.fn_injected;
    r.noise.channel_samples += n.channel_samples;
    r.noise.channels_dropped += n.channels_dropped;
    ids.push_back(s.id);
    logs.push_back(s.result.log);
  }
  r.matrix = stats::confusion(r.labels, ids, logs);

  stats::ErrorAttribution attr;
  attr.steps = static_cast<std::int64_t>(r.labels.size());
  attr.hallucinated_steps = static_cast<std::int64_t>(r.flagged.size());
  for (const auto& l : r.labels) {
    const auto& s = *by_id[l.session_id];
    const auto& rec = s.result.log.steps.at(static_cast<std::size_t>(l.step_index - 1));
    const bool should = l.expected == stats::Expected::kShouldComplete;
    if (rec.detected_complete != should) {
      ++attr.incorrect;
      if (r.flagged.count({l.session_id, l.step_index})) ++attr.incorrect_hallucinated;
    }
  }
  r.report = stats::build_report(r.matrix, r.pacing, attr, config.gamma);
  return r;
}

std::vector<genpipe::Prescription> load_worksheets(const std::string& dir) {
  std::vector<genpipe::Prescription> out;
  for (int g = 1; g <= 10; ++g) {
    char name[32];
    std::snprintf(name, sizeof name, "goal%02d.json", g);
    out.push_back(genpipe::load_prescription((std::filesystem::path(dir) / name).string()));
  }
  return out;
}

nlohmann::json batch_summary_to_json(const BatchResult& r) {
  nlohmann::json seeded = nlohmann::json::array();
  for (const auto& [sid, step] : r.seeded) seeded.push_back({{"session", sid}, {"step", step}});
  nlohmann::json flagged = nlohmann::json::array();
  for (const auto& [sid, step] : r.flagged) flagged.push_back({{"session", sid}, {"step", step}});
  return {{"seed", r.config.seed},
          {"monitored_steps", r.labels.size()},
          {"sessions", r.sessions.size()},
          {"noise",
           {{"fp_rate", r.config.fp_rate},
            {"fn_rate", r.config.fn_rate},
            {"dropout_rate", r.config.dropout_rate}}},
          {"false_positive_detections", r.false_positive_detections},
          {"seeded_hallucinations", seeded},
          {"flagged_hallucinations", flagged},
          {"report", stats::report_to_json(r.report)}};
}

}  // namespace rehab::experiments
