// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/seq/vm.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace actorforge::seq {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioAccount {
  std::string name;
  Address address;
  uint256 balance;
};

/// Arguments are JSON values: "@name" is a declared account or deployment,
/// "0x.." an address literal, decimal strings and numbers are uints,
/// booleans are bools.
struct ScenarioDeployment {
  std::string name;
  std::string contract;
  std::string deployer;
  std::vector<nlohmann::json> args;
  uint256 endowment;
};

struct ScenarioStep {
  std::string from;
  std::string to;
  std::string function;  // empty: plain value transfer
  uint256 value;
  std::vector<nlohmann::json> args;
};

struct Scenario {
  std::vector<std::filesystem::path> sources;  // resolved against the scenario's directory
  std::vector<ScenarioAccount> accounts;
  std::vector<ScenarioDeployment> deployments;
  std::vector<ScenarioStep> steps;
  std::vector<std::string> victims;
};

/// Throws ScenarioError on malformed input or on a name used before it is
/// declared.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

struct ScenarioRun {
  Vm vm;
  std::map<std::string, Address> names;
  std::vector<CallResult> results;  // one per step
  std::vector<std::size_t> step_starts;  // trace index where each step begins
  std::set<Address> victims;
  uint256 victim_loss;

  explicit ScenarioRun(VmOptions o) : vm(o) {}
};

/// Loads the scenario's sources, lets contracts from `overrides` replace
/// same-named ones, deploys and runs every step. Reverted steps are recorded,
/// not fatal. Throws ScenarioError on missing contracts or failed deployments.
ScenarioRun run_scenario(const Scenario& scenario, const std::vector<SourceUnit>& overrides = {},
                         VmOptions options = {});

/// One JSON object per event, prefixed with its trace index under "seq".
void write_trace_jsonl(std::ostream& os, const std::vector<TraceEvent>& trace);

}  // namespace actorforge::seq
