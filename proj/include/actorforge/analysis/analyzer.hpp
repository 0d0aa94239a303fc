// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/diagnostics.hpp"
#include "actorforge/dsl/ast.hpp"
#include "actorforge/seq/ast.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace actorforge::analysis {

inline constexpr std::string_view kEffectsAfterInteraction = "CEI001";

enum class FindingClass { TruePositiveCandidate, SuppressedByMutex };
std::string_view to_string(FindingClass c);

struct Finding {
  std::string rule_id;
  std::string function;
  SourceSpan span;
  Severity severity = Severity::Error;
  FindingClass classification = FindingClass::TruePositiveCandidate;
  std::size_t statement_index = 0;  // pre-order position within the function body
  std::string message;

  bool operator==(const Finding&) const = default;
};

/// `file:line:col: RULE_ID severity: message`
std::string render(const Finding& f);
nlohmann::ordered_json to_json(const Finding& f);

/// One Error per storage write that can run after an external call or value
/// transfer in the same function, on any path. Constructors are skipped.
/// Ordered by (declaration order, statement index).
std::vector<Finding> check_effects_after_interaction(const seq::ContractDef& def);

/// The boolean state variable `f` acquires with `require(!L); L = true;` as
/// its first two statements and releases with `L = false;` as its last.
std::optional<std::string> lock_of(const seq::ContractDef& def, const seq::FunctionDef& f);

/// Naive findings, downgraded to Info/SuppressedByMutex inside functions that
/// hold a lock when every externally callable state-mutating function of the
/// contract holds the same one.
std::vector<Finding> check_with_mutex_awareness(const seq::ContractDef& def);

std::size_t count_errors(const std::vector<Finding>& findings);

struct VerifyResult {
  std::vector<Finding> findings;  // rule ids VG-a .. VG-d
  bool pass() const noexcept { return findings.empty(); }
};

/// Structural check of a contract produced from `decl`: one public function
/// per action (VG-a), every guard required before the first non-lock storage
/// write (VG-b), sends after the last non-lock write unless locked (VG-c),
/// lock acquired first and released last (VG-d).
VerifyResult verify_generated(const dsl::ActorDecl& decl, const seq::ContractDef& def);

}  // namespace actorforge::analysis
