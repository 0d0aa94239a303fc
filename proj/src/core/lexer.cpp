// SPDX-License-Identifier: Apache-2.0
#include "actorforge/lexer.hpp"

#include <algorithm>
#include <array>

namespace actorforge {

namespace {

constexpr std::array<std::string_view, 9> kTwoCharSymbols = {":=", "->", "=>", "==", "!=",
                                                             "<=", ">=", "&&", "||"};
constexpr std::string_view kOneCharSymbols = "()[]{},:;.+-*/%<>=!";

bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file, std::span<const std::string_view> keywords)
      : src_(src), file_(file), keywords_(keywords) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      out.push_back(next_token());
    }
    return out;
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  SourceSpan span_at(int line, int column, int length) const {
    return SourceSpan{file_, line, column, length};
  }

  void skip_block_comment() {
    const int line = line_, column = column_;
    bump();
    bump();
    while (pos_ < src_.size()) {
      if (src_[pos_] == '*' && peek(1) == '/') {
        bump();
        bump();
        return;
      }
      bump();
    }
    throw LexError(span_at(line, column, 2), "unterminated block comment");
  }

  Token make(TokenKind kind, std::size_t start, int line, int column) {
    return Token{kind, std::string(src_.substr(start, pos_ - start)),
                 span_at(line, column, static_cast<int>(pos_ - start))};
  }

  Token next_token() {
    const std::size_t start = pos_;
    const int line = line_, column = column_;
    const char c = src_[pos_];

    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) bump();
      Token t = make(TokenKind::Identifier, start, line, column);
      if (std::find(keywords_.begin(), keywords_.end(), t.text) != keywords_.end()) {
        t.kind = TokenKind::Keyword;
      }
      return t;
    }

    if (is_digit(c)) return number(start, line, column);

    if (c == '"') {
      bump();
      std::string text;
      while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
        if (src_[pos_] == '\\' && (peek(1) == '"' || peek(1) == '\\')) bump();
        text.push_back(src_[pos_]);
        bump();
      }
      if (pos_ >= src_.size() || src_[pos_] != '"') {
        throw LexError(span_at(line, column, static_cast<int>(pos_ - start)),
                       "unterminated string literal");
      }
      bump();
      return Token{TokenKind::String, std::move(text),
                   span_at(line, column, static_cast<int>(pos_ - start))};
    }

    for (auto sym : kTwoCharSymbols) {
      if (src_.substr(pos_, 2) == sym) {
        bump();
        bump();
        return make(TokenKind::Symbol, start, line, column);
      }
    }
    if (kOneCharSymbols.find(c) != std::string_view::npos) {
      bump();
      return make(TokenKind::Symbol, start, line, column);
    }

    const auto byte = static_cast<unsigned char>(c);
    std::string shown = byte >= 0x20 && byte < 0x7f ? std::string("'") + c + "'"
                                                    : "byte 0x" + hex_byte(byte);
    throw LexError(span_at(line, column, 1), "unexpected character " + shown);
  }

  static std::string hex_byte(unsigned char b) {
    static constexpr char kDigits[] = "0123456789abcdef";
    return {kDigits[b >> 4], kDigits[b & 0xf]};
  }

  Token number(std::size_t start, int line, int column) {
    TokenKind kind = TokenKind::Number;
    if (src_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X') && is_hex(peek(2))) {
      bump();
      bump();
      while (pos_ < src_.size() && is_hex(src_[pos_])) bump();
      kind = TokenKind::HexNumber;
    } else {
      while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '_')) bump();
      if (pos_ < src_.size() && src_[pos_] == '.' && is_digit(peek(1))) {
        bump();
        while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '_')) bump();
      }
    }
    if (pos_ < src_.size() && is_ident_char(src_[pos_])) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) bump();
      throw LexError(span_at(line, column, static_cast<int>(pos_ - start)),
                     "malformed number literal '" + std::string(src_.substr(start, pos_ - start)) + "'");
    }
    return make(kind, start, line, column);
  }

  std::string_view src_;
  const std::string& file_;
  std::span<const std::string_view> keywords_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

std::string describe_token(const Token& t) {
  if (t.kind == TokenKind::String) return "string \"" + t.text + "\"";
  return "'" + t.text + "'";
}

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::HexNumber: return "hex number";
    case TokenKind::String: return "string";
    case TokenKind::Symbol: return "symbol";
  }
  return "?";
}

std::vector<Token> lex(std::string_view source, const std::string& file,
                       std::span<const std::string_view> keywords) {
  return Lexer(source, file, keywords).run();
}

TokenStream::TokenStream(std::vector<Token> tokens, std::string file)
    : tokens_(std::move(tokens)), file_(std::move(file)) {}

const Token& TokenStream::peek(std::size_t ahead) const {
  static const Token kEof{TokenKind::Symbol, "", {}};
  return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : kEof;
}

const Token& TokenStream::previous() const { return tokens_.at(pos_ - 1); }

void TokenStream::note_expected(std::string what) { expected_.insert(std::move(what)); }

bool TokenStream::at_keyword(std::string_view kw) {
  if (!at_end() && peek().kind == TokenKind::Keyword && peek().text == kw) return true;
  note_expected("'" + std::string(kw) + "'");
  return false;
}

bool TokenStream::at_symbol(std::string_view sym) {
  if (!at_end() && peek().kind == TokenKind::Symbol && peek().text == sym) return true;
  note_expected("'" + std::string(sym) + "'");
  return false;
}

bool TokenStream::at_kind(TokenKind kind, std::string_view what) {
  if (!at_end() && peek().kind == kind) return true;
  note_expected(std::string(what));
  return false;
}

bool TokenStream::accept_keyword(std::string_view kw) {
  if (!at_keyword(kw)) return false;
  advance();
  return true;
}

bool TokenStream::accept_symbol(std::string_view sym) {
  if (!at_symbol(sym)) return false;
  advance();
  return true;
}

const Token& TokenStream::expect_keyword(std::string_view kw) {
  if (!at_keyword(kw)) fail();
  return advance();
}

const Token& TokenStream::expect_symbol(std::string_view sym) {
  if (!at_symbol(sym)) fail();
  return advance();
}

const Token& TokenStream::expect_kind(TokenKind kind, std::string_view what) {
  if (!at_kind(kind, what)) fail();
  return advance();
}

const Token& TokenStream::advance() {
  if (at_end()) fail();
  expected_.clear();
  return tokens_[pos_++];
}

SourceSpan TokenStream::here() const {
  if (!at_end()) return peek().span;
  if (tokens_.empty()) return SourceSpan{file_, 1, 1, 0};
  SourceSpan s = tokens_.back().span;
  s.column += s.length;
  s.length = 0;
  return s;
}

void TokenStream::fail() {
  std::string msg = "expected ";
  if (expected_.size() > 1) msg += "one of ";
  bool first = true;
  for (const auto& e : expected_) {
    if (!first) msg += ", ";
    first = false;
    msg += e;
  }
  msg += at_end() ? " but reached end of input" : " but found " + describe_token(peek());
  throw ParseError(here(), msg);
}

void TokenStream::fail(const SourceSpan& span, const std::string& message) {
  throw ParseError(span, message);
}

}  // namespace actorforge
