// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/diagnostics.hpp"
#include "actorforge/dsl/ast.hpp"
#include "actorforge/seq/ast.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace actorforge::codegen {

class PlanError : public DiagnosticError {
 public:
  PlanError(SourceSpan span, const std::string& message) : DiagnosticError("PlanError", std::move(span), message) {}
};

inline constexpr std::string_view kLockVar = "__locked";
inline constexpr std::string_view kCapturePrefix = "__pre_";

/// Binds a pre-state read to a generated local before any update runs.
struct Capture {
  seq::TypeName type;
  std::string name;
  seq::Expr value;
};

struct PlannedSend {
  std::string port;
  seq::Expr amount;
};

/// Canonical body of one generated function. Expressions are already in the
/// target dialect.
struct EmitPlan {
  std::string action;
  std::vector<seq::Param> params;
  bool payable = false;
  std::vector<seq::Expr> guards;  // become requires, source order
  std::vector<Capture> captures;
  std::vector<seq::Stmt> updates;  // `do` and `let`, source order
  std::vector<PlannedSend> sends;  // emissions, source order
  std::string lock{kLockVar};
};

/// Throws PlanError when the action cannot be expressed as one contract
/// function, or when an emission reads a variable written both before and
/// after it.
EmitPlan plan_action(const dsl::ActorDecl& decl, const dsl::ActionDecl& action);

/// Deterministic text form of a plan (for comparisons and `--json`).
std::string describe(const EmitPlan& plan);

/// Target-dialect form of a resolved guard or body expression of `action`.
seq::Expr translate_expr(const dsl::ActionDecl& action, const dsl::Expr& e);

seq::ContractDef build_contract(const dsl::ActorDecl& decl);

/// Header comment, pragma and the contract. Propagates PlanError.
std::string generate_contract(const dsl::ActorDecl& decl);

/// `<stem>_generated.sol.txt`
std::string output_file_name(const std::filesystem::path& actor_path);

}  // namespace actorforge::codegen
