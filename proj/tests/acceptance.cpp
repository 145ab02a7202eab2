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
// Acceptance runner: one PASS/FAIL line per primary criterion, exit 0 iff
// all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "rehab/dsl/parser.hpp"
#include "rehab/dsl/printer.hpp"
#include "rehab/experiments/batch.hpp"
#include "rehab/experiments/calibration.hpp"
#include "rehab/experiments/reproduction_suite.hpp"
#include "rehab/retrofit/corpus.hpp"
#include "rehab/service/store.hpp"
#include "rehab/sim/simulator.hpp"
#include "rehab/stats/fisher.hpp"
#include "rehab/stats/wilson.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace rehab;
using Clock = std::chrono::steady_clock;

// Frozen oracles (closed-form Wilson evaluation; exact enumeration).
constexpr double kWilsonLo = 0.8492719793273428;
constexpr double kWilsonHi = 0.9122223694589543;
constexpr double kFisherCorpus = 6.38376840218821e-07;
constexpr std::int64_t kIncomplete = 144;  // round(398 * 0.363)

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Two-sided Fisher p by exact integer enumeration of the hypergeometric
// support, independent of the library implementation.
using u128 = unsigned __int128;

u128 choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  u128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
  return r;
}

double fisher_by_enumeration(int a, int b, int c, int d) {
  const int r1 = a + b, c1 = a + c, n = a + b + c + d;
  const u128 total = choose(n, c1);
  const u128 observed = choose(r1, a) * choose(n - r1, c1 - a);
  u128 tail = 0;
  for (int x = std::max(0, c1 - (n - r1)); x <= std::min(r1, c1); ++x) {
    const u128 w = choose(r1, x) * choose(n - r1, c1 - x);
    if (w <= observed) tail += w;
  }
  return static_cast<double>(static_cast<long double>(tail) / static_cast<long double>(total));
}

experiments::BatchConfig calibrated(std::uint64_t seed) {
  experiments::BatchConfig cfg;
  cfg.seed = seed;
  cfg.fp_rate = experiments::kCalibratedFpRate;
  cfg.fn_rate = experiments::kCalibratedFnRate;
  return cfg;
}

Outcome fidelity(const std::vector<genpipe::Prescription>& ws) {
  Outcome o;
  const auto t0 = Clock::now();
  const auto suite = experiments::run_fidelity_suite(ws, 100, 7);
  const double s = seconds_since(t0);
  o.require(suite.worksheet_steps == 106, "106 worksheet steps");
  o.require(suite.faithful_programs == 10, "all 10 programs correct and complete");
  o.require(suite.mutations.size() == 100, "100 mutations");
  o.require(suite.detected() == 100, "every mutation detected");
  o.require(suite.extra_flags() == 0, "zero extra flags");
  o.require(s < 10, "runtime < 10 s");
  o.detail << suite.faithful_programs << "/10 faithful over " << suite.worksheet_steps << " steps; "
           << suite.detected() << "/100 mutations detected; " << suite.extra_flags() << " extra flags; " << s << " s";
  return o;
}

Outcome hallucination(const std::vector<genpipe::Prescription>& ws) {
  Outcome o;
  auto cfg = calibrated(7);
  cfg.hallucinated_steps = 10;
  const auto r = experiments::run_batch(ws, cfg);
  o.require(r.matrix.n() == 398, "398 steps");
  o.require(r.seeded.size() == 10, "10 seeded atoms");
  o.require(r.flagged == r.seeded, "findings equal the seeded steps");
  const double share = r.report.attribution.hallucination_share();
  char pct[16];
  std::snprintf(pct, sizeof pct, "%.1f", share * 100);
  o.require(std::abs(share - 10.0 / 398.0) < 1e-12 && std::string(pct) == "2.5", "2.5% hallucination share");
  o.detail << r.flagged.size() << " findings for " << r.seeded.size() << " seeded atoms; share " << share * 100 << "%";
  return o;
}

Outcome monitoring(const std::vector<genpipe::Prescription>& ws) {
  Outcome o;
  const auto t0 = Clock::now();
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  const auto summary = experiments::run_seeds(ws, calibrated(0), seeds);
  const double s = seconds_since(t0);
  const auto ci = stats::wilson_interval(352, 398, 0.95);
  o.require(std::abs(summary.mean_accuracy - 0.884) <= 0.02, "mean accuracy 0.884 +/- 0.02");
  o.require(std::abs(ci.lower - kWilsonLo) < 1e-12 && std::abs(ci.upper - kWilsonHi) < 1e-12, "Wilson oracle");
  o.require(std::abs(ci.lower - 0.8493) <= 0.0005 && std::abs(ci.upper - 0.9122) <= 0.0005, "Wilson +/- 0.0005");
  o.require(std::abs(ci.lower - 0.843) <= 0.01 && std::abs(ci.upper - 0.915) <= 0.01, "within 0.01 of mixed-model CI");
  o.require(s < 60, "runtime < 60 s");
  o.detail << "mean accuracy " << summary.mean_accuracy << " (sens " << summary.mean_sensitivity << ", spec "
           << summary.mean_specificity << ") over 20 seeds; Wilson(352/398) = (" << ci.lower << ", " << ci.upper
           << "); " << s << " s";
  return o;
}

Outcome paradigm() {
  Outcome o;
  const auto corpus = retrofit::load_corpus(testing::data_path("corpus"), testing::data_path("templates"));
  const auto r = retrofit::evaluate_corpus(corpus);
  const auto counts = retrofit::category_count_vector(r);
  const double p = stats::fisher_exact_2x2(40, 0, 22, 18);
  const double oracle = fisher_by_enumeration(40, 0, 22, 18);
  o.require(r.entries.size() == 40, "40 fixtures");
  o.require(r.translatable == 22, "22/40 translatable");
  o.require(counts == std::vector<int>{15, 6, 6, 4, 3}, "category counts 15/6/6/4/3");
  o.require(p < 0.01, "p < 0.01");
  o.require(std::abs(p - oracle) <= 1e-10, "matches enumeration oracle");
  o.require(std::abs(p - kFisherCorpus) <= 1e-10, "matches frozen oracle");
  o.require(std::abs(r.comparison.p_value - p) <= 1e-15, "corpus table gives the same p");
  o.detail << r.translatable << "/40 translatable; counts " << counts[0] << "/" << counts[1] << "/" << counts[2] << "/"
           << counts[3] << "/" << counts[4] << "; p = " << p << " (enumeration " << oracle << ")";
  return o;
}

Outcome pacing(const std::vector<genpipe::Prescription>& ws) {
  Outcome o;
  experiments::BatchConfig zero;
  zero.seed = 7;
  const auto clean = experiments::run_batch(ws, zero);
  const auto noisy = experiments::run_batch(ws, calibrated(7));
  o.require(clean.report.pacing.adequate == 398, "zero noise: 398/398 adequate");
  o.require(noisy.report.pacing.premature == noisy.false_positive_detections,
            "premature count equals false-positive detections");
  o.detail << "zero noise " << clean.report.pacing.adequate << "/398 adequate; calibrated "
           << noisy.report.pacing.adequate_fraction() << " adequate (reference 0.928, calibration-dependent); "
           << noisy.report.pacing.premature << " premature = " << noisy.false_positive_detections
           << " false-positive detections";
  return o;
}

Outcome invariants(const std::vector<genpipe::Prescription>& ws) {
  Outcome o;
  Rng rng(6);
  int roundtrips = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_program(rng);
    const auto r = dsl::parse_program(dsl::print_program(p));
    roundtrips += r.ok() && *r.program == p;
  }
  o.require(roundtrips == 1000, "parse/print round-trip");

  const auto profile = sim::standardized_patient();
  int scripts = 0, clamped = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::faithful_program(ws[static_cast<std::size_t>(i) % ws.size()]);
    const auto script = testing::random_script(p, rng);
    const sim::NoiseModel noise{rng.uniform(0, 0.01), rng.uniform(0, 0.5), rng.uniform(0, 0.05), rng.next()};
    const auto res = sim::simulate(p, profile, script, noise);
    ++scripts;
    bool ok = true;
    for (const auto& f : res.frames) {
      for (const auto& [joint, angle] : f.joint_angles) {
        const auto rom = profile.rom(joint);
        ok = ok && angle >= rom.min_deg && angle <= rom.max_deg;
      }
    }
    Micros last{0};
    for (const auto& s : res.log.steps) {
      ok = ok && s.announced_at >= last && s.advanced_at >= s.announced_at;
      if (s.detection_at) ok = ok && *s.detection_at >= s.announced_at && *s.detection_at <= s.advanced_at;
      last = s.advanced_at;
    }
    clamped += ok;
  }
  o.require(clamped == scripts, "ROM clamping and timestamp monotonicity");

  bool wilson_ok = true;
  for (double gamma : {0.9, 0.95, 0.99}) {
    for (int num = 0; num <= 10; ++num) {
      double prev = 2;
      for (std::int64_t n = 10; n <= 2000; n += 10) {
        const double w = stats::wilson_interval(n * num / 10, n, gamma).width();
        wilson_ok = wilson_ok && w <= prev + 1e-15;
        prev = w;
      }
    }
  }
  o.require(wilson_ok, "Wilson width monotone in n");

  const auto dir = testing::scratch_dir("acceptance-store");
  service::Store store(dir.string());
  bool store_ok = true;
  for (auto kind : service::all_record_kinds()) {
    const nlohmann::json payload = {{"kind", service::to_string(kind)}, {"n", 1}};
    const auto put = store.put(kind, payload);
    const auto got = store.get(kind, put.id);
    store_ok = store_ok && got && got->digest == put.digest && got->payload == payload;
  }
  o.require(store_ok, "store round-trip");

  const auto a = experiments::run_batch(ws, calibrated(42));
  const auto b = experiments::run_batch(ws, calibrated(42));
  bool same = a.sessions.size() == b.sessions.size();
  for (std::size_t i = 0; same && i < a.sessions.size(); ++i) same = a.sessions[i].result.log == b.sessions[i].result.log;
  o.require(same, "repeated seed-42 batch identical");

  o.detail << roundtrips << "/1000 round-trips; " << clamped << "/" << scripts << " scripts within ROM and monotone; "
           << "Wilson monotone " << (wilson_ok ? "yes" : "no") << "; store round-trip " << (store_ok ? "yes" : "no")
           << "; deterministic " << (same ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const auto ws = testing::worksheets();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 fidelity reproduction", [&] { return fidelity(ws); }},
      {"2 hallucination detection", [&] { return hallucination(ws); }},
      {"3 monitoring statistics", [&] { return monitoring(ws); }},
      {"4 paradigm comparison", [] { return paradigm(); }},
      {"5 pacing", [&] { return pacing(ws); }},
      {"6 determinism and invariants", [&] { return invariants(ws); }},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (name[0] == '6') o.require(seconds_since(t0) < 300, "full suite < 5 min");
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail.str() << std::endl;
  }
  std::cout << "total " << seconds_since(t0) << " s" << std::endl;
  return all ? 0 : 1;
}
