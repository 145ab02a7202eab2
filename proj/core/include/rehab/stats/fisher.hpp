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
#ifndef REHAB_STATS_FISHER_HPP_
#define REHAB_STATS_FISHER_HPP_

#include <cstdint>
#include <vector>

namespace rehab::stats {

/// 2x2 table [[a, b], [c, d]].
struct Table2x2 {
  std::int64_t a = 0, b = 0, c = 0, d = 0;
};

/// Hypergeometric probability of every table sharing the margins of `t`,
/// indexed by the top-left cell starting at its minimum feasible value.
std::vector<double> table_probabilities(const Table2x2& t);

/// Two-sided Fisher exact p: the summed probability of all tables no more
/// likely than the observed one. Ties are accepted with a relative slack of
/// 1e-12. Throws std::domain_error on negative counts or a zero margin.
double fisher_exact_2x2(const Table2x2& t);

inline double fisher_exact_2x2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return fisher_exact_2x2(Table2x2{a, b, c, d});
}

}  // namespace rehab::stats

#endif  // REHAB_STATS_FISHER_HPP_
