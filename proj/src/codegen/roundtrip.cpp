// SPDX-License-Identifier: Apache-2.0
#include "actorforge/codegen/roundtrip.hpp"

#include "actorforge/codegen/codegen.hpp"
#include "actorforge/seq/frontend.hpp"
#include "actorforge/seq/scenario.hpp"

#include <algorithm>

namespace actorforge::codegen {

bool RoundtripReport::pass() const {
  if (parse_error || !verify.pass() || analysis::count_errors(analyzer) > 0) return false;
  return std::all_of(replays.begin(), replays.end(),
                     [](const ScenarioReplay& r) { return !r.error && r.victim_loss == 0; });
}

RoundtripReport roundtrip_check(const dsl::ActorDecl& decl, const std::vector<std::filesystem::path>& scenarios) {
  RoundtripReport report;
  report.source = generate_contract(decl);
  seq::SourceUnit unit;
  try {
    unit = seq::parse_contracts(report.source, decl.name + "_generated.sol.txt");
  } catch (const DiagnosticError& e) {
    report.parse_error = render(e.first());
    return report;
  }
  const seq::ContractDef& def = *unit.find(decl.name);
  report.verify = analysis::verify_generated(decl, def);
  report.analyzer = analysis::check_with_mutex_awareness(def);

  for (const auto& path : scenarios) {
    ScenarioReplay replay{path, 0, 0, std::nullopt};
    try {
      seq::Scenario s = seq::load_scenario(path);
      const bool applies = std::any_of(s.deployments.begin(), s.deployments.end(),
                                       [&](const seq::ScenarioDeployment& d) { return d.contract == decl.name; });
      if (!applies) continue;
      seq::ScenarioRun run = seq::run_scenario(s, {unit});
      replay.victim_loss = run.victim_loss;
      for (const auto& e : run.vm.trace()) {
        if (const auto* r = std::get_if<seq::RevertEvent>(&e)) {
          replay.lock_reverts += r->reason == seq::RevertReason::Require && r->message == "re-entrant call";
        }
      }
    } catch (const std::exception& e) {
      replay.error = e.what();
    }
    report.replays.push_back(std::move(replay));
  }
  return report;
}

std::vector<std::filesystem::path> bundled_scenarios(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".scenario") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace actorforge::codegen
