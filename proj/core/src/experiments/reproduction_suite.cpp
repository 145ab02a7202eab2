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
#include "rehab/experiments/reproduction_suite.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "rehab/common/text.hpp"
#include "rehab/experiments/calibration.hpp"
#include "rehab/genpipe/fidelity.hpp"
#include "rehab/genpipe/hallucination.hpp"
#include "rehab/genpipe/template_generator.hpp"
#include "rehab/runtime/log_codec.hpp"
#include "rehab/stats/fisher.hpp"
#include "rehab/stats/wilson.hpp"

namespace rehab::experiments {

namespace fs = std::filesystem;
using genpipe::MutationKind;
using genpipe::StepVerdict;

MutationCheck verify_mutation(const genpipe::Prescription& rx, const genpipe::Mutation& m) {
  MutationCheck c;
  c.label = m.label;
  const auto fid = genpipe::validate_fidelity(rx, m.program);
  const auto findings = genpipe::detect_hallucinated_monitors(rx, m.program);
  const auto mism = fid.mismatches();
  const auto& l = m.label;
  const std::string want = text::normalize_utterance(l.text);
  auto program_text = [&](const genpipe::AlignedStep& s) {
    return text::normalize_utterance(m.program.steps.at(static_cast<std::size_t>(*s.program_index - 1)).utterance);
  };
  auto rx_text = [&](const genpipe::AlignedStep& s) {
    return text::normalize_utterance(rx.steps.at(static_cast<std::size_t>(*s.rx_index - 1)).text);
  };

  if (l.kind == MutationKind::kHallucinateAtom) {
    c.extra_flags = static_cast<int>(mism.size());
    for (const auto& f : findings) {
      if (f.step_index == l.program_step && f.symbol == l.detail && !c.detected) {
        c.detected = true;
      } else {
        ++c.extra_flags;
      }
    }
    return c;
  }

  c.extra_flags = static_cast<int>(findings.size());
  for (const auto& s : mism) {
    bool hit = false;
    switch (l.kind) {
      case MutationKind::kOmit:
        hit = s.verdict == StepVerdict::kOmitted && rx_text(s) == want;
        break;
      case MutationKind::kDuplicate:
        hit = s.verdict == StepVerdict::kExtraneous && program_text(s) == want;
        break;
      case MutationKind::kSubstitute:
        hit = s.verdict == StepVerdict::kSubstituted && rx_text(s) == want &&
              program_text(s) == text::normalize_utterance(l.detail);
        break;
      case MutationKind::kReorder:
        hit = s.verdict == StepVerdict::kReordered && program_text(s) == want;
        break;
      case MutationKind::kHallucinateAtom:
        break;
    }
    if (hit && !c.detected) {
      c.detected = true;
    } else {
      ++c.extra_flags;
    }
  }
  return c;
}

int FidelitySuite::detected() const {
  int n = 0;
  for (const auto& m : mutations) n += m.detected;
  return n;
}

int FidelitySuite::extra_flags() const {
  int n = 0;
  for (const auto& m : mutations) n += m.extra_flags;
  return n;
}

FidelitySuite run_fidelity_suite(const std::vector<genpipe::Prescription>& worksheets, int count,
                                 std::uint64_t base_seed) {
  FidelitySuite s;
  std::vector<dsl::InterventionProgram> programs;
  for (const auto& rx : worksheets) {
    s.worksheet_steps += static_cast<int>(rx.steps.size());
    programs.push_back(genpipe::translate_prescription(rx));
    const auto rep = genpipe::validate_fidelity(rx, programs.back());
    if (rep.correct && rep.complete && genpipe::detect_hallucinated_monitors(rx, programs.back()).empty()) {
      ++s.faithful_programs;
    }
  }
  const MutationKind kinds[] = {MutationKind::kOmit, MutationKind::kDuplicate, MutationKind::kSubstitute,
                                MutationKind::kReorder, MutationKind::kHallucinateAtom};
  std::set<std::string> keys;
  const std::size_t w = worksheets.size();
  for (std::uint64_t i = 0; static_cast<int>(s.mutations.size()) < count && i < 100000; ++i) {
    const auto kind = kinds[i % 5];
    const std::size_t g = (i / 5) % w;
    try {
      const auto m = genpipe::mutate_program(programs[g], kind, base_seed + i, &worksheets[g]);
      if (!keys.insert(m.label.key()).second) continue;
      s.mutations.push_back(verify_mutation(worksheets[g], m));
    } catch (const genpipe::MutationImpossible&) {
    }
  }
  return s;
}

bool SuiteResult::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

std::string category_table_text(const retrofit::CorpusResult& r) {
  std::ostringstream os;
  const auto counts = category_count_vector(r);
  const char* names[] = {"Procedural Variation", "New Equipment Use", "Contingency",
                         "Compensatory Strategy Options", "Motor Priming"};
  const auto n = r.entries.size();
  os << "Incompatibility category           count  share\n";
  for (int i = 0; i < 5; ++i) {
    os << std::left << std::setw(35) << names[i] << std::right << std::setw(5) << counts[i] << "  "
       << std::fixed << std::setprecision(1) << (n ? 100.0 * counts[i] / static_cast<double>(n) : 0.0) << "%\n";
  }
  const auto& t = r.comparison.table;
  os << "\nTranslatable under template: " << r.translatable << "/" << n << "\n";
  os << "Proposed paradigm:           " << t.a << "/" << (t.a + t.b) << "\n";
  os << "2x2 [[" << t.a << "," << t.b << "],[" << t.c << "," << t.d << "]]  Fisher p = " << std::scientific
     << std::setprecision(6) << r.comparison.p_value << "\n";
  return os.str();
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

SuiteResult run_reproduction_suite(const SuiteConfig& config) {
  SuiteResult out;
  const fs::path data(config.data_dir);
  const auto worksheets = load_worksheets((data / "worksheets").string());
  const double fp = config.fp_rate > 0 ? config.fp_rate : kCalibratedFpRate;
  const double fn = config.fn_rate > 0 ? config.fn_rate : kCalibratedFnRate;

  // 1. Fidelity.
  {
    const auto t0 = Clock::now();
    const auto fs_ = run_fidelity_suite(worksheets, config.mutations, config.seed);
    Check c{"fidelity", false, "", 0};
    const int n = static_cast<int>(fs_.mutations.size());
    c.passed = fs_.faithful_programs == static_cast<int>(worksheets.size()) && n == config.mutations &&
               fs_.detected() == n && fs_.extra_flags() == 0;
    c.detail = std::to_string(fs_.worksheet_steps) + " worksheet steps, " + std::to_string(fs_.faithful_programs) +
               "/" + std::to_string(worksheets.size()) + " faithful programs, " + std::to_string(fs_.detected()) +
               "/" + std::to_string(n) + " mutations detected, " + std::to_string(fs_.extra_flags()) +
               " extra flags";
    c.seconds = since(t0);
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& m : fs_.mutations) {
      auto j = genpipe::label_to_json(m.label);
      j["detected"] = m.detected;
      j["extra_flags"] = m.extra_flags;
      labels.push_back(std::move(j));
    }
    out.details["fidelity"] = {{"worksheet_steps", fs_.worksheet_steps}, {"mutations", labels}};
    out.checks.push_back(std::move(c));
  }

  // 2. Hallucination.
  {
    const auto t0 = Clock::now();
    BatchConfig cfg;
    cfg.seed = config.seed;
    cfg.hallucinated_steps = config.hallucinated_steps;
    const auto r = run_batch(worksheets, cfg);
    const auto& a = r.report.attribution;
    Check c{"hallucination", false, "", 0};
    c.passed = r.flagged == r.seeded && static_cast<int>(r.seeded.size()) == config.hallucinated_steps;
    c.detail = std::to_string(r.flagged.size()) + " findings for " + std::to_string(r.seeded.size()) +
               " seeded atoms over " + std::to_string(a.steps) + " steps; hallucination share " +
               fmt(100 * a.hallucination_share(), 1) + "%";
    c.seconds = since(t0);
    out.details["hallucination"] = batch_summary_to_json(r);
    out.checks.push_back(std::move(c));
  }

  // 3. Monitoring statistics.
  {
    const auto t0 = Clock::now();
    BatchConfig cfg;
    cfg.fp_rate = fp;
    cfg.fn_rate = fn;
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < config.accuracy_seeds; ++i) seeds.push_back(config.seed + static_cast<std::uint64_t>(i));
    const auto s = run_seeds(worksheets, cfg, seeds);
    const auto w = stats::wilson_interval(352, 398, 0.95);
    cfg.seed = config.seed;
    const auto first = run_batch(worksheets, cfg);
    out.monitoring_table = stats::report_to_text(first.report);
    Check c{"monitoring", false, "", 0};
    c.passed = std::abs(s.mean_accuracy - kTargetAccuracy) <= 0.02 && std::abs(w.lower - 0.843) <= 0.01 &&
               std::abs(w.upper - 0.915) <= 0.01;
    c.detail = "mean accuracy " + fmt(s.mean_accuracy) + " over " + std::to_string(seeds.size()) +
               " seeds (target 0.884 +/- 0.02); Wilson(352/398) = (" + fmt(w.lower) + ", " + fmt(w.upper) + ")";
    c.seconds = since(t0);
    out.details["monitoring"] = {{"fp_rate", fp},
                                 {"fn_rate", fn},
                                 {"accuracies", s.accuracies},
                                 {"mean_accuracy", s.mean_accuracy},
                                 {"mean_sensitivity", s.mean_sensitivity},
                                 {"mean_specificity", s.mean_specificity},
                                 {"wilson_352_398", {w.lower, w.upper}},
                                 {"first_seed", batch_summary_to_json(first)}};
    out.checks.push_back(std::move(c));
  }

  // 4. Paradigm comparison.
  {
    const auto t0 = Clock::now();
    const auto corpus = retrofit::load_corpus((data / "corpus").string(), (data / "templates").string());
    const auto r = retrofit::evaluate_corpus(corpus);
    const auto counts = retrofit::category_count_vector(r);
    int matching = 0;
    for (const auto& e : r.entries) matching += e.matches_expectation;
    const auto& t = r.comparison.table;
    Check c{"paradigm", false, "", 0};
    c.passed = r.entries.size() == 40 && r.translatable == 22 && counts == std::vector<int>{15, 6, 6, 4, 3} &&
               t.a == 40 && t.b == 0 && t.c == 22 && t.d == 18 && r.comparison.p_value < 0.01 &&
               matching == static_cast<int>(r.entries.size());
    std::ostringstream d;
    d << r.translatable << "/" << r.entries.size() << " translatable; categories " << counts[0] << "/" << counts[1]
      << "/" << counts[2] << "/" << counts[3] << "/" << counts[4] << "; Fisher p = " << std::scientific
      << std::setprecision(4) << r.comparison.p_value << "; " << matching << " fixtures as expected";
    c.detail = d.str();
    c.seconds = since(t0);
    out.category_table = category_table_text(r);
    out.details["paradigm"] = retrofit::corpus_result_to_json(r);
    out.checks.push_back(std::move(c));
  }

  // 5. Pacing.
  {
    const auto t0 = Clock::now();
    BatchConfig clean;
    clean.seed = config.seed;
    const auto z = run_batch(worksheets, clean);
    BatchConfig noisy = clean;
    noisy.fp_rate = fp;
    noisy.fn_rate = fn;
    const auto k = run_batch(worksheets, noisy);
    Check c{"pacing", false, "", 0};
    c.passed = z.report.pacing.adequate == z.report.pacing.total() && z.matrix.fp == 0 && z.matrix.fn == 0 &&
               k.report.pacing.premature == k.false_positive_detections;
    c.detail = "zero noise " + fmt(z.report.pacing.adequate_fraction(), 3) + " adequate; calibrated " +
               fmt(k.report.pacing.adequate_fraction(), 3) + " adequate (reference 0.928), " +
               std::to_string(k.report.pacing.premature) + " premature = " +
               std::to_string(k.false_positive_detections) + " false-positive detections";
    c.seconds = since(t0);
    out.details["pacing"] = {{"zero_noise", stats::report_to_json(z.report)},
                             {"calibrated", stats::report_to_json(k.report)}};
    out.checks.push_back(std::move(c));
  }

  // 6. Determinism of a repeated session.
  {
    const auto t0 = Clock::now();
    BatchConfig cfg;
    cfg.seed = 42;
    cfg.fp_rate = fp;
    cfg.fn_rate = fn;
    const auto a = run_batch(worksheets, cfg);
    const auto b = run_batch(worksheets, cfg);
    bool same = a.sessions.size() == b.sessions.size();
    for (std::size_t i = 0; same && i < a.sessions.size(); ++i) {
      same = runtime::log_to_json(a.sessions[i].result.log).dump() ==
             runtime::log_to_json(b.sessions[i].result.log).dump();
    }
    Check c{"determinism", same, same ? "repeated seed-42 batch produced identical logs" : "logs differ", since(t0)};
    out.checks.push_back(std::move(c));
  }

  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : out.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
  }
  out.details["checks"] = checks;
  return out;
}

void write_suite_report(const SuiteResult& r, const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(fs::path(out_dir) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(out_dir) / name).string());
    f << body;
  };
  write("summary.json", r.details.dump(2) + "\n");
  write("checks.json", r.details.at("checks").dump(2) + "\n");
  write("monitoring.txt", r.monitoring_table);
  write("categories.txt", r.category_table);
  std::ostringstream os;
  for (const auto& c : r.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << " (" << fmt(c.seconds, 2) << " s)\n";
  }
  os << "\n" << r.monitoring_table << "\n" << r.category_table;
  write("report.txt", os.str());
}

}  // namespace rehab::experiments
