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
#ifndef REHAB_GENPIPE_PROMPT_HPP_
#define REHAB_GENPIPE_PROMPT_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "rehab/genpipe/prescription.hpp"

namespace rehab::genpipe {

struct ExamplePair {
  std::string prescription_text;
  std::string program_text;
};

/// The four system-prompt components.
struct PromptConfig {
  std::string language_doc;
  std::string api_library;
  std::string coding_guideline;
  std::vector<ExamplePair> examples;
};

class PromptConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PromptBundle {
  std::string language_doc;
  std::string api_library;
  std::string coding_guideline;
  std::vector<ExamplePair> example_programs;
  std::string prescription_payload;

  /// System part: components (i)-(iv) in order.
  std::string system_text() const;
  /// Full prompt: system text followed by the prescription payload.
  std::string render() const;
  /// sha256 of render(); keys replay transcripts.
  std::string digest() const;
};

/// Reads language_doc.md, api_library.md, coding_guideline.md and every
/// examples/<name>.txt + examples/<name>.dsl pair from `dir`.
PromptConfig load_prompt_config(const std::string& dir);

/// Numbered step list followed by the annotation document.
std::string prescription_payload(const Prescription& rx);

/// Throws PromptConfigError when a component is empty or an example
/// program does not parse and validate.
PromptBundle assemble_prompt(const Prescription& rx, const PromptConfig& config);

}  // namespace rehab::genpipe

#endif  // REHAB_GENPIPE_PROMPT_HPP_
