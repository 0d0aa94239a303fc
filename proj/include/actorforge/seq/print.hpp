// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/seq/ast.hpp"

#include <string>

namespace actorforge::seq {

/// Canonical source text. Parenthesizes only where precedence requires it;
/// whole-ether integers print with the `ether` suffix.
std::string print_expr(const Expr& e);
std::string print_contract(const ContractDef& c);

}  // namespace actorforge::seq
