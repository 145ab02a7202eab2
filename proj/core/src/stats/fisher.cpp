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
#include "rehab/stats/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rehab::stats {

namespace {

constexpr double kTieSlack = 1e-12;

void check(const Table2x2& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) {
    throw std::domain_error("fisher_exact_2x2: counts must be nonnegative");
  }
  if (t.a + t.b == 0 || t.c + t.d == 0 || t.a + t.c == 0 || t.b + t.d == 0) {
    throw std::domain_error("fisher_exact_2x2: every margin must be positive");
  }
}

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

}  // namespace

std::vector<double> table_probabilities(const Table2x2& t) {
  check(t);
  const std::int64_t r1 = t.a + t.b;
  const std::int64_t r2 = t.c + t.d;
  const std::int64_t c1 = t.a + t.c;
  const std::int64_t n = r1 + r2;
  const std::int64_t lo = std::max<std::int64_t>(0, c1 - r2);
  const std::int64_t hi = std::min(r1, c1);
  const double log_total = log_choose(n, c1);
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t x = lo; x <= hi; ++x) {
    probs.push_back(std::exp(log_choose(r1, x) + log_choose(r2, c1 - x) - log_total));
  }
  return probs;
}

double fisher_exact_2x2(const Table2x2& t) {
  const auto probs = table_probabilities(t);
  const std::int64_t lo = std::max<std::int64_t>(0, (t.a + t.c) - (t.c + t.d));
  const double observed = probs[static_cast<std::size_t>(t.a - lo)];
  const double cutoff = observed * (1 + kTieSlack);
  double p = 0;
  double total = 0;
  for (double q : probs) {
    if (q <= cutoff) p += q;
    total += q;
  }
  return std::min(p / total, 1.0);
}

}  // namespace rehab::stats
