// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/analysis/analyzer.hpp"
#include "actorforge/dsl/ast.hpp"
#include "actorforge/numeric.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace actorforge::codegen {

struct ScenarioReplay {
  std::filesystem::path scenario;
  uint256 victim_loss;
  std::size_t lock_reverts = 0;  // Require reverts hitting the generated lock
  std::optional<std::string> error;
};

struct RoundtripReport {
  std::string source;                   // generated text
  std::optional<std::string> parse_error;  // the contract parser rejected it
  analysis::VerifyResult verify;
  std::vector<analysis::Finding> analyzer;  // mutex-aware findings
  std::vector<ScenarioReplay> replays;

  bool pass() const;
};

/// Generates, re-parses, verifies and replays every scenario that deploys a
/// contract with the actor's name, with the generated contract substituted.
/// Propagates PlanError from generation.
RoundtripReport roundtrip_check(const dsl::ActorDecl& decl, const std::vector<std::filesystem::path>& scenarios);

/// The `*.scenario` files of a directory, sorted by name.
std::vector<std::filesystem::path> bundled_scenarios(const std::filesystem::path& dir);

}  // namespace actorforge::codegen
