// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/seq/ast.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace actorforge::seq {

/// Parses contract-dialect source (pragma lines, interfaces, contracts).
/// Throws LexError / ParseError. Identifiers are left unresolved.
SourceUnit parse_unit(std::string_view source, const std::string& file = "<input>");

/// Binds identifiers to state variables or locals, turns `Name(x)` into a
/// cast when Name is a contract or interface, and checks declarations
/// (NameError, TypeError). Returns the diagnostics; `unit` is annotated in
/// place.
std::vector<Diagnostic> resolve_unit(SourceUnit& unit);

/// parse_unit + resolve_unit; throws ResolveError on any diagnostic.
SourceUnit parse_contracts(std::string_view source, const std::string& file = "<input>");

/// Reads and parses a `.sol.txt` file.
SourceUnit load_contracts(const std::filesystem::path& path);

}  // namespace actorforge::seq
