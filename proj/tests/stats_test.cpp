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

#include "rehab/experiments/batch.hpp"
#include "rehab/stats/confusion.hpp"
#include "rehab/stats/fisher.hpp"
#include "rehab/stats/report.hpp"
#include "rehab/stats/wilson.hpp"
#include "support/fixtures.hpp"

namespace rehab::stats {
namespace {

// Oracle values computed once with an independent hypergeometric enumeration
// and the closed-form Wilson score formula, then frozen.
constexpr double kWilsonLo = 0.8492719793273428;
constexpr double kWilsonHi = 0.9122223694589543;
constexpr double kFisherCorpus = 6.38376840218821e-07;
constexpr double kFisher3113 = 0.48571428571428565;
constexpr double kFisher10_2_3_15 = 0.0005367241191434357;

runtime::StepRecord monitored(int index, bool detected) {
  runtime::StepRecord s;
  s.index = index;
  s.monitored = true;
  s.detected_complete = detected;
  return s;
}

TEST(Confusion, OneOfEach) {
  runtime::SessionLog log;
  log.steps = {monitored(1, true), monitored(2, false), monitored(3, false), monitored(4, true)};
  const std::vector<PreLabel> labels{{"s", 1, Expected::kShouldComplete},
                                     {"s", 2, Expected::kShouldComplete},
                                     {"s", 3, Expected::kShouldNotComplete},
                                     {"s", 4, Expected::kShouldNotComplete}};
  EXPECT_EQ(confusion(labels, {"s"}, {log}), (ConfusionMatrix{1, 1, 1, 1}));
}

TEST(Confusion, MissingLabelIsAPairingError) {
  runtime::SessionLog log;
  log.steps = {monitored(1, true), monitored(2, false)};
  EXPECT_THROW(confusion({{"s", 1, Expected::kShouldComplete}}, {"s"}, {log}), PairingError);
  EXPECT_THROW(confusion({{"s", 1, Expected::kShouldComplete}, {"s", 2, Expected::kShouldComplete},
                          {"s", 3, Expected::kShouldComplete}},
                         {"s"}, {log}),
               PairingError);
}

TEST(Wilson, ReferenceInterval) {
  const auto ci = wilson_interval(352, 398, 0.95);
  EXPECT_NEAR(ci.lower, kWilsonLo, 1e-12);
  EXPECT_NEAR(ci.upper, kWilsonHi, 1e-12);
  EXPECT_NEAR(ci.lower, 0.8493, 0.0005);
  EXPECT_NEAR(ci.upper, 0.9122, 0.0005);
  // Within 0.01 of the mixed-model interval reported alongside it.
  EXPECT_NEAR(ci.lower, 0.843, 0.01);
  EXPECT_NEAR(ci.upper, 0.915, 0.01);
}

TEST(Wilson, Boundaries) {
  EXPECT_DOUBLE_EQ(wilson_interval(40, 40).upper, 1.0);
  EXPECT_DOUBLE_EQ(wilson_interval(0, 40).lower, 0.0);
  EXPECT_THROW(wilson_interval(1, 0), std::domain_error);
  EXPECT_THROW(wilson_interval(5, 4), std::domain_error);
  EXPECT_THROW(wilson_interval(1, 4, 1.0), std::domain_error);
}

TEST(Property, WilsonWidthNonincreasingInN) {
  for (double gamma : {0.8, 0.9, 0.95, 0.99}) {
    for (int num = 0; num <= 10; ++num) {
      // p = num / 10 is exact for n that are multiples of 10.
      double prev = 2;
      for (std::int64_t n = 10; n <= 5000; n += 10) {
        const double w = wilson_interval(n * num / 10, n, gamma).width();
        ASSERT_LE(w, prev + 1e-15) << "gamma=" << gamma << " p=" << num / 10.0 << " n=" << n;
        prev = w;
      }
    }
  }
}

TEST(Fisher, Oracles) {
  EXPECT_NEAR(fisher_exact_2x2(40, 0, 22, 18), kFisherCorpus, 1e-10);
  EXPECT_LT(fisher_exact_2x2(40, 0, 22, 18), 0.01);
  EXPECT_DOUBLE_EQ(fisher_exact_2x2(1, 0, 0, 1), 1.0);
  EXPECT_NEAR(fisher_exact_2x2(3, 1, 1, 3), kFisher3113, 1e-10);
  EXPECT_NEAR(fisher_exact_2x2(10, 2, 3, 15), kFisher10_2_3_15, 1e-10);
}

TEST(Fisher, RowSwapSymmetry) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto a = static_cast<std::int64_t>(rng.below(30)), b = static_cast<std::int64_t>(rng.below(30));
    const auto c = static_cast<std::int64_t>(rng.below(30)), d = static_cast<std::int64_t>(rng.below(30));
    if (a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0) continue;
    EXPECT_NEAR(fisher_exact_2x2(a, b, c, d), fisher_exact_2x2(c, d, a, b), 1e-12);
    EXPECT_NEAR(fisher_exact_2x2(a, b, c, d), fisher_exact_2x2(b, a, d, c), 1e-12);
  }
}

TEST(Fisher, ProbabilitiesSumToOne) {
  const auto probs = table_probabilities(Table2x2{40, 0, 22, 18});
  double s = 0;
  for (double p : probs) s += p;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Fisher, DegenerateMargins) {
  EXPECT_THROW(fisher_exact_2x2(1, 0, 0, 0), std::domain_error);
  EXPECT_THROW(fisher_exact_2x2(0, 0, 3, 4), std::domain_error);
}

TEST(Report, PerfectBatchHasUnitAccuracy) {
  experiments::BatchConfig cfg;
  cfg.seed = 3;
  const auto r = experiments::run_batch(testing::worksheets(), cfg);
  EXPECT_EQ(r.matrix.n(), 398);
  EXPECT_EQ(r.matrix.fp, 0);
  EXPECT_EQ(r.matrix.fn, 0);
  ASSERT_TRUE(r.report.accuracy.has_value());
  EXPECT_DOUBLE_EQ(r.report.accuracy->point, 1.0);
  EXPECT_DOUBLE_EQ(r.report.accuracy->ci.upper, 1.0);
  EXPECT_TRUE(r.report.accuracy->ci.contains(1.0));
  EXPECT_EQ(r.report.pacing.adequate, 398);
  EXPECT_EQ(r.false_positive_detections, 0);
}

TEST(Report, HallucinationShare) {
  experiments::BatchConfig cfg;
  cfg.seed = 5;
  cfg.hallucinated_steps = 10;
  const auto r = experiments::run_batch(testing::worksheets(), cfg);
  EXPECT_EQ(r.seeded.size(), 10u);
  EXPECT_EQ(r.flagged, r.seeded);
  EXPECT_DOUBLE_EQ(r.report.attribution.hallucination_share(), 10.0 / 398.0);
  EXPECT_NE(report_to_text(r.report).find("2.5%"), std::string::npos);
}

TEST(Report, EmptyCategoriesHaveNoMetric) {
  const auto r = build_report(ConfusionMatrix{5, 0, 0, 0}, {}, {}, 0.95);
  EXPECT_TRUE(r.sensitivity.has_value());
  EXPECT_FALSE(r.specificity.has_value());
}

}  // namespace
}  // namespace rehab::stats
