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
#ifndef REHAB_COMMON_TEXT_HPP_
#define REHAB_COMMON_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace rehab::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Utterance normal form used for fidelity comparison: lowercase, runs of
/// whitespace collapsed to one space, trailing punctuation stripped.
std::string normalize_utterance(std::string_view s);

std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - distance / max(len). Two empty strings are identical (1.0).
double similarity(std::string_view a, std::string_view b);

/// Lowercased alphanumeric words; apostrophes and hyphens are kept inside words.
std::vector<std::string> words(std::string_view s);

bool contains_word(std::string_view haystack, std::string_view word);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace rehab::text

#endif  // REHAB_COMMON_TEXT_HPP_
