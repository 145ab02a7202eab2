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
#ifndef REHAB_DSL_LEXER_HPP_
#define REHAB_DSL_LEXER_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "rehab/dsl/diagnostic.hpp"

namespace rehab::dsl {

enum class TokenKind {
  kIdent,
  kString,    // text holds the unescaped value
  kNumber,    // decimal, optionally signed; `integral` set when no '.'/exponent
  kDuration,  // NUM immediately followed by 's'; number holds seconds
  kLParen,
  kRParen,
  kComma,
  kColon,
  kEnd,
};

const char* to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  double number = 0;
  bool integral = false;
  SourceSpan span;
};

/// Tokenizes the whole source. Lexical errors are appended to `diags` and the
/// offending bytes skipped, so the returned stream always ends with kEnd.
std::vector<Token> tokenize(std::string_view source, std::vector<Diagnostic>& diags);

}  // namespace rehab::dsl

#endif  // REHAB_DSL_LEXER_HPP_
