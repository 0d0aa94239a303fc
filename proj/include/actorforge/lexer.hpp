// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/diagnostics.hpp"

#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace actorforge {

enum class TokenKind { Keyword, Identifier, Number, HexNumber, String, Symbol };

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Symbol;
  std::string text;  // for String tokens: the unquoted contents
  SourceSpan span;

  bool operator==(const Token&) const = default;
};

/// Shared tokenizer for actor, network and contract sources. Whitespace (incl.
/// CR), `//` line comments and `/* */` block comments are skipped; everything
/// else becomes exactly one token. Words listed in `keywords` become Keyword
/// tokens. Throws LexError on a character outside the alphabet or an
/// unterminated string/comment.
std::vector<Token> lex(std::string_view source, const std::string& file,
                       std::span<const std::string_view> keywords);

/// Cursor over a token vector with expected-set tracking for ParseError.
class TokenStream {
 public:
  TokenStream(std::vector<Token> tokens, std::string file);

  bool at_end() const noexcept { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const;
  const Token& previous() const;

  bool at_keyword(std::string_view kw);
  bool at_symbol(std::string_view sym);
  bool at_kind(TokenKind kind, std::string_view what);

  bool accept_keyword(std::string_view kw);
  bool accept_symbol(std::string_view sym);

  const Token& expect_keyword(std::string_view kw);
  const Token& expect_symbol(std::string_view sym);
  const Token& expect_kind(TokenKind kind, std::string_view what);
  const Token& advance();

  /// Span of the current token, or a zero-length span after the last token.
  SourceSpan here() const;

  /// Throws ParseError listing the expected set accumulated since the last
  /// consumed token.
  [[noreturn]] void fail();
  [[noreturn]] void fail(const SourceSpan& span, const std::string& message);

 private:
  void note_expected(std::string what);

  std::vector<Token> tokens_;
  std::string file_;
  std::size_t pos_ = 0;
  std::set<std::string> expected_;
};

}  // namespace actorforge
