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
#include "rehab/dsl/parser.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rehab/dsl/lexer.hpp"
#include "rehab/dsl/semantics.hpp"

namespace rehab::dsl {

namespace {

// Thrown internally to unwind to the nearest recovery point.
struct SyntaxAbort {};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
      : toks_(std::move(tokens)), diags_(diags) {}

  std::optional<InterventionProgram> program() {
    InterventionProgram prog;
    bool ok = true;
    try {
      expect_keyword("program");
      prog.name = expect(TokenKind::kString, "program name").text;
    } catch (const SyntaxAbort&) {
      ok = false;
      sync(0);
    }
    while (!at_end()) {
      const std::size_t start = pos_;
      try {
        if (at_keyword("scene")) {
          prog.scene.push_back(scene());
        } else if (at_keyword("step")) {
          prog.steps.push_back(step());
        } else {
          error_here("expected 'scene' or 'step'");
        }
      } catch (const SyntaxAbort&) {
        ok = false;
        sync(start);
      }
    }
    if (!ok) return std::nullopt;
    return prog;
  }

  std::optional<Predicate> lone_predicate() {
    try {
      Predicate p = pred();
      if (!at_end()) error_here("unexpected trailing input");
      return p;
    } catch (const SyntaxAbort&) {
      return std::nullopt;
    }
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == TokenKind::kEnd; }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at_keyword(std::string_view kw) const {
    return peek().kind == TokenKind::kIdent && peek().text == kw;
  }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  // Skip to the next top-level declaration keyword, always past `start`.
  void sync(std::size_t start) {
    if (!at_end() && pos_ == start) advance();
    while (!at_end() && !at_keyword("scene") && !at_keyword("step")) advance();
  }

  void syntax_error(const SourceSpan& span, std::string message) {
    Diagnostic d;
    d.kind = DiagnosticKind::kSyntax;
    d.rule = rules::kSyntaxError;
    d.message = std::move(message);
    d.span = span;
    d.step_index = current_step_;
    diags_.push_back(std::move(d));
  }

  [[noreturn]] void error_here(const std::string& what) {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::kIdent ? "'" + t.text + "'" : to_string(t.kind);
    syntax_error(t.span, what + ", found " + found);
    throw SyntaxAbort{};
  }

  const Token& expect(TokenKind k, const std::string& what) {
    if (!at(k)) error_here("expected " + what);
    return advance();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) error_here("expected '" + std::string(kw) + "'");
    advance();
  }

  SourceSpan span_since(const Token& first) const {
    const Token& last = toks_[pos_ == 0 ? 0 : pos_ - 1];
    return {first.span.begin, std::max(first.span.end, last.span.end), first.span.loc};
  }

  double number() {
    const Token& t = expect(TokenKind::kNumber, "number");
    return t.number;
  }

  double duration() {
    const Token& t = expect(TokenKind::kDuration, "duration such as '3s'");
    return t.number;
  }

  int integer(const std::string& what) {
    if (!at(TokenKind::kNumber) || !peek().integral) error_here("expected " + what);
    const Token& t = advance();
    if (std::abs(t.number) > std::numeric_limits<int>::max()) {
      syntax_error(t.span, what + " out of range");
      throw SyntaxAbort{};
    }
    return static_cast<int>(t.number);
  }

  std::string ident(const std::string& what) {
    return expect(TokenKind::kIdent, what).text;
  }

  SceneDecl scene() {
    const Token& first = advance();  // 'scene'
    SceneDecl d;
    if (at_keyword("target")) {
      d.kind = SceneKind::kTarget;
    } else if (at_keyword("object")) {
      d.kind = SceneKind::kObject;
    } else if (at_keyword("joint")) {
      d.kind = SceneKind::kJoint;
    } else {
      error_here("expected 'target', 'object' or 'joint'");
    }
    advance();
    d.id = ident("identifier");
    if (d.kind != SceneKind::kJoint && at_keyword("at")) {
      advance();
      expect(TokenKind::kLParen, "'('");
      Vec3 v;
      v.x = number();
      expect(TokenKind::kComma, "','");
      v.y = number();
      expect(TokenKind::kComma, "','");
      v.z = number();
      expect(TokenKind::kRParen, "')'");
      d.position = v;
    }
    d.span = span_since(first);
    return d;
  }

  Step step() {
    const Token& first = advance();  // 'step'
    current_step_.reset();
    Step s;
    s.index = integer("step number");
    current_step_ = s.index;
    expect(TokenKind::kColon, "':'");
    expect_keyword("say");
    s.utterance = expect(TokenKind::kString, "utterance string").text;
    if (at_keyword("expect")) s.expect = expectation();
    if (at_keyword("on")) {
      const Token& on = advance();
      expect_keyword("timeout");
      expect(TokenKind::kColon, "':'");
      expect_keyword("say");
      Fallback fb;
      fb.utterance = expect(TokenKind::kString, "fallback utterance").text;
      if (!at_keyword("expect")) {
        // Grammar requires an expectation; report it with its own rule id.
        Diagnostic d;
        d.kind = DiagnosticKind::kSyntax;
        d.rule = rules::kFallbackWithoutExpect;
        d.message = "fallback must specify 'expect within ...'";
        d.span = span_since(on);
        d.step_index = s.index;
        diags_.push_back(std::move(d));
        throw SyntaxAbort{};
      }
      fb.expect = expectation();
      fb.span = span_since(on);
      s.fallback = std::move(fb);
      while (at_keyword("on")) {
        const Token& extra = advance();
        while (!at_end() && !at_keyword("step") && !at_keyword("scene") && !at_keyword("on")) {
          advance();
        }
        Diagnostic d;
        d.kind = DiagnosticKind::kSemantic;
        d.rule = rules::kNestedFallback;
        d.message = "only one fallback level is allowed per step";
        d.span = span_since(extra);
        d.step_index = s.index;
        diags_.push_back(std::move(d));
      }
    }
    s.span = span_since(first);
    current_step_.reset();
    return s;
  }

  Expectation expectation() {
    advance();  // 'expect'
    expect_keyword("within");
    Expectation e;
    e.timeout_s = duration();
    expect(TokenKind::kColon, "':'");
    e.predicate = pred();
    return e;
  }

  Predicate pred() {
    const Token& first = peek();
    if (first.kind != TokenKind::kIdent) error_here("expected monitor predicate");
    Predicate p;
    if (first.text == "all" || first.text == "any") {
      advance();
      expect(TokenKind::kLParen, "'('");
      std::vector<Predicate> terms;
      terms.push_back(pred());
      while (at(TokenKind::kComma)) {
        advance();
        terms.push_back(pred());
      }
      expect(TokenKind::kRParen, "')'");
      if (first.text == "all") {
        p = Predicate(AllOf{std::move(terms)});
      } else {
        p = Predicate(AnyOf{std::move(terms)});
      }
    } else if (first.text == "hold") {
      advance();
      expect(TokenKind::kLParen, "'('");
      HoldFor h;
      h.atom = atom();
      expect(TokenKind::kComma, "','");
      h.seconds = duration();
      expect(TokenKind::kRParen, "')'");
      p = Predicate(std::move(h));
    } else if (first.text == "count") {
      advance();
      expect(TokenKind::kLParen, "'('");
      CountOf c;
      c.atom = atom();
      expect(TokenKind::kComma, "','");
      c.times = integer("repetition count");
      expect(TokenKind::kRParen, "')'");
      p = Predicate(std::move(c));
    } else {
      p = Predicate(atom());
    }
    p.span = span_since(first);
    return p;
  }

  Atom atom() {
    if (!at(TokenKind::kIdent)) error_here("expected monitor atom");
    const std::string kw = peek().text;
    if (kw == "joint_angle") {
      advance();
      expect(TokenKind::kLParen, "'('");
      JointAngle a;
      a.joint = ident("joint name");
      expect(TokenKind::kComma, "','");
      a.min_deg = number();
      expect(TokenKind::kComma, "','");
      a.max_deg = number();
      expect(TokenKind::kRParen, "')'");
      return a;
    }
    if (kw == "hand_at") {
      advance();
      expect(TokenKind::kLParen, "'('");
      HandAt a;
      a.target = ident("target name");
      expect(TokenKind::kComma, "','");
      a.radius_cm = number();
      expect(TokenKind::kRParen, "')'");
      return a;
    }
    if (kw == "grasp" || kw == "release") {
      advance();
      expect(TokenKind::kLParen, "'('");
      std::string obj = ident("object name");
      expect(TokenKind::kRParen, "')'");
      if (kw == "grasp") return Grasp{std::move(obj)};
      return Release{std::move(obj)};
    }
    if (kw == "object_at") {
      advance();
      expect(TokenKind::kLParen, "'('");
      ObjectAt a;
      a.object = ident("object name");
      expect(TokenKind::kComma, "','");
      a.target = ident("target name");
      expect(TokenKind::kComma, "','");
      a.radius_cm = number();
      expect(TokenKind::kRParen, "')'");
      return a;
    }
    if (kw == "rest") {
      advance();
      expect(TokenKind::kLParen, "'('");
      Rest a;
      a.joint = ident("joint name");
      expect(TokenKind::kComma, "','");
      a.seconds = duration();
      expect(TokenKind::kRParen, "')'");
      return a;
    }
    error_here("expected monitor atom");
  }

  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::optional<int> current_step_;
};

}  // namespace

ParseResult parse_structure(std::string_view source) {
  ParseResult r;
  auto tokens = tokenize(source, r.diagnostics);
  const bool lex_ok = r.diagnostics.empty();
  Parser parser(std::move(tokens), r.diagnostics);
  auto prog = parser.program();
  if (lex_ok && prog) r.program = std::move(prog);
  return r;
}

ParseResult parse_program(std::string_view source) {
  ParseResult r = parse_structure(source);
  if (!r.program) return r;
  auto sem = validate_semantics(*r.program);
  r.diagnostics.insert(r.diagnostics.end(), sem.begin(), sem.end());
  if (!r.diagnostics.empty()) r.program.reset();
  return r;
}

ParseResult parse_predicate(std::string_view source, Predicate* out) {
  ParseResult r;
  auto tokens = tokenize(source, r.diagnostics);
  Parser parser(std::move(tokens), r.diagnostics);
  auto p = parser.lone_predicate();
  if (p && r.diagnostics.empty() && out) *out = std::move(*p);
  return r;
}

}  // namespace rehab::dsl
