// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/dsl/ast.hpp"
#include "actorforge/lexer.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace actorforge::dsl {

/// Tokenizes `.actor` source.
std::vector<Token> tokenize(std::string_view source, const std::string& file = "<input>");

/// Parses one actor from `tokens`. Throws ParseError with the expected-token
/// set on malformed input. No name resolution happens here.
ActorDecl parse_actor(std::vector<Token> tokens, const std::string& file = "<input>");

/// tokenize + parse_actor.
ActorDecl parse_actor_source(std::string_view source, const std::string& file = "<input>");

/// Binds every identifier, types every expression and checks the action
/// invariants. On failure throws ResolveError carrying every diagnostic found
/// (codes NameError, TypeError, DirectionError).
ActorDecl resolve(ActorDecl decl);

/// Same checks, returning the diagnostics instead of throwing; `decl` is
/// annotated in place.
std::vector<Diagnostic> resolve_in_place(ActorDecl& decl);

/// Canonical source text for `decl`. parse(unparse(d)) is structurally equal
/// to d.
std::string unparse(const ActorDecl& decl);
std::string unparse(const Expr& e);

/// Reads, parses and resolves an `.actor` file. Throws std::runtime_error if
/// the file cannot be read.
ActorDecl load_actor(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Names bound implicitly by consuming one token from a `msg` port.
inline constexpr std::string_view kSenderVar = "sender";
inline constexpr std::string_view kValueVar = "value";

}  // namespace actorforge::dsl
