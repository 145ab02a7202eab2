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
#include "rehab/dsl/lexer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace rehab::dsl {

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::kIdent: return "identifier";
    case TokenKind::kString: return "string";
    case TokenKind::kNumber: return "number";
    case TokenKind::kDuration: return "duration";
    case TokenKind::kLParen: return "'('";
    case TokenKind::kRParen: return "')'";
    case TokenKind::kComma: return "','";
    case TokenKind::kColon: return "':'";
    case TokenKind::kEnd: return "end of input";
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  os << d.span.loc.line << ':' << d.span.loc.column << ": " << d.rule << ": " << d.message;
  if (d.step_index) os << " (step " << *d.step_index << ')';
  return os;
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
  std::ostringstream os;
  for (const auto& d : diags) os << d << '\n';
  return os.str();
}

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Length of the UTF-8 sequence starting at s[i], or 0 when malformed.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len;
  std::uint32_t cp;
  if (b0 < 0x80) return 1;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>& diags) : src_(src), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        Token end;
        end.kind = TokenKind::kEnd;
        end.span = span_from(pos_, mark());
        out.push_back(std::move(end));
        return out;
      }
      if (auto tok = next()) out.push_back(std::move(*tok));
    }
  }

 private:
  struct Mark {
    std::size_t pos;
    SourceLoc loc;
  };

  Mark mark() const { return {pos_, {line_, col_}}; }

  SourceSpan span_from(std::size_t end, const Mark& m) const { return {m.pos, end, m.loc}; }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  unsigned char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? static_cast<unsigned char>(src_[pos_ + ahead]) : 0;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const unsigned char c = peek();
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(c)) {
        bump();
      } else {
        return;
      }
    }
  }

  void error(const Mark& m, std::string message) {
    Diagnostic d;
    d.kind = DiagnosticKind::kLexical;
    d.rule = rules::kLexError;
    d.message = std::move(message);
    d.span = span_from(std::max(pos_, m.pos + 1), m);
    diags_.push_back(std::move(d));
  }

  std::optional<Token> next() {
    const Mark m = mark();
    const unsigned char c = peek();
    Token tok;
    switch (c) {
      case '(': tok.kind = TokenKind::kLParen; bump(); break;
      case ')': tok.kind = TokenKind::kRParen; bump(); break;
      case ',': tok.kind = TokenKind::kComma; bump(); break;
      case ':': tok.kind = TokenKind::kColon; bump(); break;
      case '"': return lex_string(m);
      default:
        if (is_ident_start(c)) {
          while (pos_ < src_.size() && is_ident_char(peek())) bump();
          tok.kind = TokenKind::kIdent;
          tok.text = std::string(src_.substr(m.pos, pos_ - m.pos));
        } else if (is_digit(c) || ((c == '-' || c == '+' || c == '.') && (is_digit(peek(1)) || (peek(1) == '.' && is_digit(peek(2)))))) {
          return lex_number(m);
        } else {
          // Skip one whole UTF-8 sequence (or one byte when malformed).
          const std::size_t len = std::max<std::size_t>(1, utf8_sequence_length(src_, pos_));
          for (std::size_t k = 0; k < len && pos_ < src_.size(); ++k) bump();
          std::ostringstream msg;
          if (c >= 0x20 && c < 0x7F) {
            msg << "unexpected character '" << static_cast<char>(c) << "'";
          } else {
            msg << "unexpected byte 0x" << std::hex << static_cast<int>(c);
          }
          error(m, msg.str());
          return std::nullopt;
        }
    }
    tok.span = span_from(pos_, m);
    return tok;
  }

  std::optional<Token> lex_string(const Mark& m) {
    bump();  // opening quote
    std::string value;
    for (;;) {
      if (pos_ >= src_.size() || peek() == '\n') {
        error(m, "unterminated string literal");
        return std::nullopt;
      }
      const unsigned char c = peek();
      if (c == '"') {
        bump();
        break;
      }
      if (c == '\\') {
        const Mark esc = mark();
        bump();
        if (pos_ >= src_.size()) continue;
        const unsigned char e = peek();
        bump();
        switch (e) {
          case '"': value.push_back('"'); break;
          case '\\': value.push_back('\\'); break;
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          default:
            error(esc, "invalid escape sequence");
            break;
        }
        continue;
      }
      if (c < 0x20) {
        const Mark bad = mark();
        bump();
        error(bad, "control character in string literal");
        continue;
      }
      const std::size_t len = utf8_sequence_length(src_, pos_);
      if (len == 0) {
        const Mark bad = mark();
        bump();
        error(bad, "invalid UTF-8 in string literal");
        continue;
      }
      value.append(src_.substr(pos_, len));
      for (std::size_t k = 0; k < len; ++k) bump();
    }
    Token tok;
    tok.kind = TokenKind::kString;
    tok.text = std::move(value);
    tok.span = span_from(pos_, m);
    return tok;
  }

  std::optional<Token> lex_number(const Mark& m) {
    if (peek() == '-' || peek() == '+') bump();
    bool integral = true;
    while (is_digit(peek())) bump();
    if (peek() == '.' && is_digit(peek(1))) {
      integral = false;
      bump();
      while (is_digit(peek())) bump();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (is_digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && is_digit(peek(2))))) {
      integral = false;
      bump();
      if (peek() == '-' || peek() == '+') bump();
      while (is_digit(peek())) bump();
    }
    std::string_view lexeme = src_.substr(m.pos, pos_ - m.pos);
    if (!lexeme.empty() && lexeme.front() == '+') lexeme.remove_prefix(1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
    if (ec != std::errc() || ptr != lexeme.data() + lexeme.size() || !std::isfinite(value)) {
      error(m, "number out of range");
      return std::nullopt;
    }
    Token tok;
    tok.kind = TokenKind::kNumber;
    tok.number = value;
    tok.integral = integral;
    if (peek() == 's' && !is_ident_char(peek(1))) {
      bump();
      tok.kind = TokenKind::kDuration;
    } else if (is_ident_start(peek())) {
      while (pos_ < src_.size() && is_ident_char(peek())) bump();
      error(m, "malformed number or duration");
      return std::nullopt;
    }
    tok.text = std::string(src_.substr(m.pos, pos_ - m.pos));
    tok.span = span_from(pos_, m);
    return tok;
  }

  std::string_view src_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, std::vector<Diagnostic>& diags) {
  return Lexer(source, diags).run();
}

}  // namespace rehab::dsl
