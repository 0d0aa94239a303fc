// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/numeric.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace actorforge::cli {

enum ExitCode : int { kOk = 0, kDiagnostics = 1, kUsage = 2, kInternal = 3 };

/// Entry point of the `actorforge` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct DemoRow {
  std::string configuration;
  std::string model;
  uint256 victim_loss;
  uint256 expected;
  std::string error;  // non-empty when the configuration could not run

  bool ok() const { return error.empty() && victim_loss == expected; }
};

/// Vulnerable, reordered-fix and generated-mutex DAOs under the sequential
/// model, then the DAO/attacker network under the dataflow model.
std::vector<DemoRow> attack_demo(const std::filesystem::path& fixtures);

/// Compile-time fixture directory, overridable with ACTORFORGE_FIXTURE_DIR.
std::filesystem::path default_fixture_dir();

}  // namespace actorforge::cli
