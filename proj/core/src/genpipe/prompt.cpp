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
#include "rehab/genpipe/prompt.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rehab/common/digest.hpp"
#include "rehab/common/text.hpp"
#include "rehab/dsl/diagnostic.hpp"
#include "rehab/dsl/parser.hpp"

namespace rehab::genpipe {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw PromptConfigError("cannot read prompt component '" + p.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

std::string PromptBundle::system_text() const {
  std::ostringstream out;
  out << "# Language documentation\n\n" << language_doc << "\n\n";
  out << "# API library\n\n" << api_library << "\n\n";
  out << "# Coding guideline\n\n" << coding_guideline << "\n\n";
  out << "# Example programs\n";
  for (std::size_t i = 0; i < example_programs.size(); ++i) {
    out << "\n## Example " << i + 1 << "\n\nPrescription:\n"
        << example_programs[i].prescription_text << "\nProgram:\n"
        << example_programs[i].program_text;
  }
  return out.str();
}

std::string PromptBundle::render() const {
  return system_text() + "\n# Prescription\n\n" + prescription_payload;
}

std::string PromptBundle::digest() const { return sha256_hex(render()); }

PromptConfig load_prompt_config(const std::string& dir) {
  const fs::path root(dir);
  PromptConfig c;
  c.language_doc = read_file(root / "language_doc.md");
  c.api_library = read_file(root / "api_library.md");
  c.coding_guideline = read_file(root / "coding_guideline.md");
  std::vector<fs::path> programs;
  if (fs::is_directory(root / "examples")) {
    for (const auto& e : fs::directory_iterator(root / "examples")) {
      if (e.path().extension() == ".dsl") programs.push_back(e.path());
    }
  }
  std::sort(programs.begin(), programs.end());
  for (const auto& p : programs) {
    fs::path rx = p;
    rx.replace_extension(".txt");
    c.examples.push_back({read_file(rx), read_file(p)});
  }
  return c;
}

std::string prescription_payload(const Prescription& rx) {
  std::ostringstream out;
  out << "Prescription " << rx.id;
  if (rx.goal_id) out << " (exercise goal " << *rx.goal_id << ")";
  out << "\n";
  for (std::size_t i = 0; i < rx.steps.size(); ++i) {
    out << i + 1 << ". " << rx.steps[i].text << "\n";
  }
  out << "\nAnnotations:\n" << prescription_to_json(rx).dump(2) << "\n";
  return out.str();
}

PromptBundle assemble_prompt(const Prescription& rx, const PromptConfig& config) {
  auto require = [](const std::string& s, const char* name) {
    if (text::trim(s).empty()) throw PromptConfigError(std::string("prompt component '") + name + "' is empty");
  };
  require(config.language_doc, "language_doc");
  require(config.api_library, "api_library");
  require(config.coding_guideline, "coding_guideline");
  if (config.examples.empty()) throw PromptConfigError("prompt component 'example_programs' is empty");
  for (std::size_t i = 0; i < config.examples.size(); ++i) {
    require(config.examples[i].prescription_text, "example prescription");
    const auto parsed = dsl::parse_program(config.examples[i].program_text);
    if (!parsed.ok()) {
      throw PromptConfigError("example program " + std::to_string(i + 1) +
                              " does not validate:\n" + dsl::format_diagnostics(parsed.diagnostics));
    }
  }
  PromptBundle b;
  b.language_doc = config.language_doc;
  b.api_library = config.api_library;
  b.coding_guideline = config.coding_guideline;
  b.example_programs = config.examples;
  b.prescription_payload = prescription_payload(rx);
  return b;
}

}  // namespace rehab::genpipe
