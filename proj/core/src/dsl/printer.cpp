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
#include "rehab/dsl/printer.hpp"

#include <charconv>
#include <sstream>

namespace rehab::dsl {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

namespace {

std::string seconds(double v) { return format_number(v) + "s"; }

void print_terms(std::ostringstream& os, const char* kw, const std::vector<Predicate>& terms) {
  os << kw << '(';
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) os << ", ";
    os << print_predicate(terms[i]);
  }
  os << ')';
}

}  // namespace

std::string print_atom(const Atom& a) {
  std::ostringstream os;
  os << atom_keyword(a) << '(';
  if (const auto* x = std::get_if<JointAngle>(&a)) {
    os << x->joint << ", " << format_number(x->min_deg) << ", " << format_number(x->max_deg);
  } else if (const auto* x = std::get_if<HandAt>(&a)) {
    os << x->target << ", " << format_number(x->radius_cm);
  } else if (const auto* x = std::get_if<Grasp>(&a)) {
    os << x->object;
  } else if (const auto* x = std::get_if<Release>(&a)) {
    os << x->object;
  } else if (const auto* x = std::get_if<ObjectAt>(&a)) {
    os << x->object << ", " << x->target << ", " << format_number(x->radius_cm);
  } else if (const auto* x = std::get_if<Rest>(&a)) {
    os << x->joint << ", " << seconds(x->seconds);
  }
  os << ')';
  return os.str();
}

std::string print_predicate(const Predicate& p) {
  std::ostringstream os;
  if (const auto* a = std::get_if<Atom>(&p.node)) {
    os << print_atom(*a);
  } else if (const auto* all = std::get_if<AllOf>(&p.node)) {
    print_terms(os, "all", all->terms);
  } else if (const auto* any = std::get_if<AnyOf>(&p.node)) {
    print_terms(os, "any", any->terms);
  } else if (const auto* h = std::get_if<HoldFor>(&p.node)) {
    os << "hold(" << print_atom(h->atom) << ", " << seconds(h->seconds) << ')';
  } else if (const auto* c = std::get_if<CountOf>(&p.node)) {
    os << "count(" << print_atom(c->atom) << ", " << c->times << ')';
  }
  return os.str();
}

std::string print_program(const InterventionProgram& p) {
  std::ostringstream os;
  os << "program " << quote(p.name) << '\n';
  if (!p.scene.empty()) os << '\n';
  for (const auto& d : p.scene) {
    os << "scene " << to_string(d.kind) << ' ' << d.id;
    if (d.position) {
      os << " at (" << format_number(d.position->x) << ", " << format_number(d.position->y)
         << ", " << format_number(d.position->z) << ')';
    }
    os << '\n';
  }
  for (const auto& s : p.steps) {
    os << "\nstep " << s.index << ": say " << quote(s.utterance) << '\n';
    if (s.expect) {
      os << "  expect within " << seconds(s.expect->timeout_s) << ": "
         << print_predicate(s.expect->predicate) << '\n';
    }
    if (s.fallback) {
      os << "  on timeout: say " << quote(s.fallback->utterance) << '\n'
         << "    expect within " << seconds(s.fallback->expect.timeout_s) << ": "
         << print_predicate(s.fallback->expect.predicate) << '\n';
    }
  }
  return os.str();
}

}  // namespace rehab::dsl
