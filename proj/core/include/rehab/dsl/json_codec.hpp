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
#ifndef REHAB_DSL_JSON_CODEC_HPP_
#define REHAB_DSL_JSON_CODEC_HPP_

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rehab/dsl/ast.hpp"

namespace rehab::dsl {

class JsonCodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json atom_to_json(const Atom& a);
nlohmann::json predicate_to_json(const Predicate& p);
nlohmann::json program_to_json(const InterventionProgram& p);

/// Inverse of the *_to_json functions. Throws JsonCodecError on shape errors;
/// semantic validity is not checked.
Atom atom_from_json(const nlohmann::json& j);
Predicate predicate_from_json(const nlohmann::json& j);
InterventionProgram program_from_json(const nlohmann::json& j);

}  // namespace rehab::dsl

#endif  // REHAB_DSL_JSON_CODEC_HPP_
