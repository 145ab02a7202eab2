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
#ifndef REHAB_DSL_PRINTER_HPP_
#define REHAB_DSL_PRINTER_HPP_

#include <string>

#include "rehab/dsl/ast.hpp"

namespace rehab::dsl {

/// Canonical text for a program; always ends with a newline.
std::string print_program(const InterventionProgram& p);

std::string print_predicate(const Predicate& p);
std::string print_atom(const Atom& a);

/// Shortest decimal that round-trips, e.g. 5, 2.54, -0.5.
std::string format_number(double v);

/// Quoted string literal with DSL escapes.
std::string quote(const std::string& s);

}  // namespace rehab::dsl

#endif  // REHAB_DSL_PRINTER_HPP_
