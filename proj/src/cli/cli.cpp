// SPDX-License-Identifier: Apache-2.0
#include "actorforge/cli.hpp"

#include "actorforge/analysis/analyzer.hpp"
#include "actorforge/codegen/codegen.hpp"
#include "actorforge/codegen/roundtrip.hpp"
#include "actorforge/dataflow/classify.hpp"
#include "actorforge/dataflow/runtime.hpp"
#include "actorforge/dsl/frontend.hpp"
#include "actorforge/dsl/network.hpp"
#include "actorforge/seq/frontend.hpp"
#include "actorforge/seq/scenario.hpp"
#include "actorforge/version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace actorforge::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Bad invocation: unknown file, unwritable output, malformed flag value.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FileKind { Actor, Network, Contract, Scenario, Unknown };

FileKind kind_of(const fs::path& p) {
  const std::string name = p.filename().string();
  auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".actor")) return FileKind::Actor;
  if (ends_with(".network")) return FileKind::Network;
  if (ends_with(".sol.txt") || ends_with(".sol")) return FileKind::Contract;
  if (ends_with(".scenario") || ends_with(".json")) return FileKind::Scenario;
  return FileKind::Unknown;
}

void require_file(const fs::path& p) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw UsageError("cannot read '" + p.string() + "': no such file");
}

ojson versioned() {
  ojson j;
  j["version"] = std::string(kVersion);
  return j;
}

std::string ether_text(const uint256& wei) { return format_ether(wei); }

std::size_t env_max_steps() {
  const char* v = std::getenv("ACTORFORGE_MAX_STEPS");
  if (!v || !*v) return 10'000;
  auto parsed = parse_decimal(v);
  if (!parsed || *parsed > std::numeric_limits<std::size_t>::max()) {
    throw UsageError(std::string("ACTORFORGE_MAX_STEPS must be a non-negative integer, got '") + v + "'");
  }
  return static_cast<std::size_t>(*parsed);
}

ojson expr_list(const std::vector<dsl::Expr>& exprs) {
  ojson out = ojson::array();
  for (const auto& e : exprs) out.push_back(dsl::unparse(e));
  return out;
}

ojson actor_json(const dsl::ActorDecl& d) {
  ojson j = versioned();
  j["kind"] = "actor";
  j["name"] = d.name;
  auto ports = [](const std::vector<dsl::PortDecl>& ps) {
    ojson out = ojson::array();
    for (const auto& p : ps) out.push_back({{"name", p.name}, {"type", std::string(dsl::to_string(p.token_type))}});
    return out;
  };
  j["inputs"] = ports(d.inputs);
  j["outputs"] = ports(d.outputs);
  j["state"] = ojson::array();
  for (const auto& v : d.state_vars) {
    j["state"].push_back({{"name", v.name}, {"type", std::string(dsl::to_string(v.var_type))}});
  }
  j["actions"] = ojson::array();
  for (const auto& a : d.actions) {
    ojson aj;
    aj["name"] = a.name;
    aj["consumes"] = ojson::array();
    for (const auto& c : a.consumes) aj["consumes"].push_back({{"port", c.port}, {"counts", c.counts}, {"patterns", c.patterns}});
    aj["guards"] = expr_list(a.guards);
    aj["statements"] = a.body.size();
    j["actions"].push_back(aj);
  }
  j["schedule"] = d.schedule ? ojson(d.schedule->initial) : ojson(nullptr);
  return j;
}

void print_actor(std::ostream& out, const dsl::ActorDecl& d) {
  out << "actor " << d.name << "\n";
  for (const auto& p : d.inputs) out << "  in " << p.name << " : " << dsl::to_string(p.token_type) << "\n";
  for (const auto& p : d.outputs) out << "  out " << p.name << " : " << dsl::to_string(p.token_type) << "\n";
  for (const auto& v : d.state_vars) out << "  state " << v.name << " : " << dsl::to_string(v.var_type) << "\n";
  for (const auto& a : d.actions) {
    out << "  action " << a.name << ": " << a.consumes.size() << " consume, " << a.guards.size() << " guard, "
        << a.body.size() << " statement\n";
  }
  if (d.schedule) out << "  schedule from " << d.schedule->initial << ", " << d.schedule->transitions.size() << " transitions\n";
}

ojson contract_json(const seq::SourceUnit& u) {
  ojson j = versioned();
  j["kind"] = "contracts";
  j["contracts"] = ojson::array();
  for (const auto& c : u.contracts) {
    ojson cj;
    cj["name"] = c.name;
    cj["interface"] = c.is_interface;
    cj["state"] = ojson::array();
    for (const auto& v : c.state_vars) cj["state"].push_back({{"name", v.name}, {"type", seq::to_string(v.type)}});
    cj["functions"] = ojson::array();
    for (const auto& f : c.functions) {
      cj["functions"].push_back({{"name", f.name}, {"payable", f.payable}, {"statements", f.body.size()}});
    }
    cj["constructor"] = c.constructor.has_value();
    cj["fallback"] = c.fallback.has_value();
    j["contracts"].push_back(cj);
  }
  return j;
}

class App {
 public:
  App(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  bool json = false;

  int diagnostics(const std::vector<Diagnostic>& diags) {
    if (json) {
      ojson j = versioned();
      j["ok"] = false;
      j["diagnostics"] = ojson::array();
      for (const auto& d : diags) j["diagnostics"].push_back(to_json(d));
      out_ << j.dump(2) << "\n";
    } else {
      for (const auto& d : diags) err_ << render(d) << "\n";
    }
    return kDiagnostics;
  }

  int parse(const fs::path& path) {
    require_file(path);
    try {
      switch (kind_of(path)) {
        case FileKind::Actor: {
          auto d = dsl::parse_actor_source(dsl::read_text_file(path), path.string());
          if (json) {
            out_ << actor_json(d).dump(2) << "\n";
          } else {
            print_actor(out_, d);
          }
          return kOk;
        }
        case FileKind::Network: {
          auto n = dsl::load_network(path);
          if (json) {
            ojson j = versioned();
            j["kind"] = "network";
            j["name"] = n.name;
            j["instances"] = n.instances.size();
            j["connections"] = n.connections.size();
            j["feeds"] = n.feeds.size();
            out_ << j.dump(2) << "\n";
          } else {
            out_ << "network " << n.name << ": " << n.instances.size() << " instances, " << n.connections.size()
                 << " connections, " << n.feeds.size() << " feeds\n";
          }
          return kOk;
        }
        case FileKind::Contract: {
          auto u = seq::parse_unit(dsl::read_text_file(path), path.string());
          if (json) {
            out_ << contract_json(u).dump(2) << "\n";
          } else {
            for (const auto& c : u.contracts) {
              out_ << (c.is_interface ? "interface " : "contract ") << c.name << ": " << c.state_vars.size()
                   << " state variables, " << c.functions.size() << " functions"
                   << (c.constructor ? ", constructor" : "") << (c.fallback ? ", fallback" : "") << "\n";
            }
          }
          return kOk;
        }
        case FileKind::Scenario: {
          auto s = seq::load_scenario(path);
          if (json) {
            ojson j = versioned();
            j["kind"] = "scenario";
            j["accounts"] = s.accounts.size();
            j["deployments"] = s.deployments.size();
            j["steps"] = s.steps.size();
            out_ << j.dump(2) << "\n";
          } else {
            out_ << "scenario: " << s.accounts.size() << " accounts, " << s.deployments.size() << " deployments, "
                 << s.steps.size() << " steps\n";
          }
          return kOk;
        }
        case FileKind::Unknown:
          break;
      }
    } catch (const seq::ScenarioError& e) {
      return diagnostics({Diagnostic{{path.string(), 1, 1, 0}, Severity::Error, "ScenarioError", e.what()}});
    } catch (const DiagnosticError& e) {
      return diagnostics(e.diagnostics());
    }
    throw UsageError("unrecognized file type '" + path.string() + "'");
  }

  int check(const fs::path& path, bool naive) {
    require_file(path);
    try {
      switch (kind_of(path)) {
        case FileKind::Actor: {
          auto d = dsl::parse_actor_source(dsl::read_text_file(path), path.string());
          auto diags = dsl::resolve_in_place(d);
          if (!diags.empty()) return diagnostics(diags);
          return report_ok(d.name + ": ok");
        }
        case FileKind::Network: {
          auto n = dsl::load_network(path);
          return report_ok(n.name + ": ok");
        }
        case FileKind::Contract:
          return check_contracts(path, naive);
        default:
          break;
      }
    } catch (const DiagnosticError& e) {
      return diagnostics(e.diagnostics());
    }
    throw UsageError("check accepts .actor, .network and .sol.txt files");
  }

  int classify(const fs::path& path, const std::optional<fs::path>& script, std::size_t firings) {
    require_file(path);
    if (script) require_file(*script);
    dsl::ActorDecl d;
    try {
      d = dsl::load_actor(path);
    } catch (const DiagnosticError& e) {
      return diagnostics(e.diagnostics());
    }
    const auto c = dataflow::classify_actor(d);
    std::vector<dataflow::RateVector> observed;
    if (script) {
      try {
        observed = dataflow::simulate_rates(
            d, dataflow::parse_input_script(nlohmann::json::parse(dsl::read_text_file(*script))), firings);
      } catch (const std::exception& e) {
        throw UsageError("bad input script '" + script->string() + "': " + e.what());
      }
    }
    if (json) {
      ojson j = versioned();
      j["actor"] = d.name;
      j["class"] = std::string(dataflow::to_string(c.kind));
      j["summary"] = c.str();
      j["signature"] = ojson::array();
      for (const auto& v : c.signature.sequence) j["signature"].push_back(v.str());
      if (!c.reason.empty()) j["reason"] = c.reason;
      if (script) {
        j["observed"] = ojson::array();
        for (const auto& v : observed) j["observed"].push_back(v.str());
      }
      out_ << j.dump(2) << "\n";
    } else {
      out_ << d.name << ": " << c.str() << "\n";
      if (!c.reason.empty()) out_ << "  reason: " << c.reason << "\n";
      if (script) {
        out_ << "  observed:";
        for (const auto& v : observed) out_ << " " << v.str();
        out_ << "\n";
      }
    }
    return kOk;
  }

  int compile(const fs::path& path, const fs::path& out_dir, const fs::path& fixtures) {
    require_file(path);
    std::error_code ec;
    if (!fs::is_directory(out_dir, ec)) throw UsageError("output directory '" + out_dir.string() + "' does not exist");
    dsl::ActorDecl d;
    codegen::RoundtripReport report;
    try {
      d = dsl::load_actor(path);
      report = codegen::roundtrip_check(d, codegen::bundled_scenarios(fixtures));
    } catch (const DiagnosticError& e) {
      return diagnostics(e.diagnostics());
    }
    const fs::path target = out_dir / codegen::output_file_name(path);
    {
      std::ofstream f(target, std::ios::binary);
      if (!f || !(f << report.source)) throw UsageError("cannot write '" + target.string() + "'");
    }
    const bool pass = report.pass();
    if (json) {
      ojson j = versioned();
      j["output"] = target.string();
      j["parsed"] = !report.parse_error;
      if (report.parse_error) j["parse_error"] = *report.parse_error;
      j["verify"] = report.verify.pass() ? "Pass" : "Fail";
      j["verify_findings"] = ojson::array();
      for (const auto& f : report.verify.findings) j["verify_findings"].push_back(analysis::to_json(f));
      j["analyzer"] = ojson::array();
      for (const auto& f : report.analyzer) j["analyzer"].push_back(analysis::to_json(f));
      j["scenarios"] = ojson::array();
      for (const auto& r : report.replays) {
        ojson rj{{"scenario", r.scenario.filename().string()}, {"victim_loss_wei", to_decimal(r.victim_loss)},
                 {"lock_reverts", r.lock_reverts}};
        if (r.error) rj["error"] = *r.error;
        j["scenarios"].push_back(rj);
      }
      j["pass"] = pass;
      out_ << j.dump(2) << "\n";
    } else {
      out_ << "wrote " << target.string() << "\n";
      if (report.parse_error) {
        out_ << "parse: FAIL " << *report.parse_error << "\n";
      } else {
        out_ << "verify: " << (report.verify.pass() ? "Pass" : "Fail") << "\n";
        for (const auto& f : report.verify.findings) out_ << "  " << analysis::render(f) << "\n";
        out_ << "analyzer: " << analysis::count_errors(report.analyzer) << " error(s), "
             << report.analyzer.size() - analysis::count_errors(report.analyzer) << " suppressed\n";
        for (const auto& r : report.replays) {
          out_ << "scenario " << r.scenario.filename().string() << ": ";
          if (r.error) {
            out_ << "error: " << *r.error << "\n";
          } else {
            out_ << "victim_loss=" << ether_text(r.victim_loss) << ", lock reverts=" << r.lock_reverts << "\n";
          }
        }
      }
    }
    return pass ? kOk : kDiagnostics;
  }

  struct SimulateOptions {
    std::string model;
    std::optional<std::size_t> max_steps;
    std::optional<fs::path> trace;
    std::optional<std::size_t> buffer_cap;
    std::optional<std::size_t> max_depth;
    std::vector<fs::path> contracts;
  };

  int simulate(const fs::path& path, const SimulateOptions& o) {
    require_file(path);
    std::string model = o.model;
    if (model.empty()) model = kind_of(path) == FileKind::Network ? "dataflow" : "sequential";
    if (model == "dataflow") return simulate_dataflow(path, o);
    return simulate_sequential(path, o);
  }

  int attack_demo_cmd(const fs::path& fixtures) {
    const auto rows = attack_demo(fixtures);
    bool pass = std::all_of(rows.begin(), rows.end(), [](const DemoRow& r) { return r.ok(); });
    if (json) {
      ojson j = versioned();
      j["rows"] = ojson::array();
      for (const auto& r : rows) {
        ojson rj;
        rj["configuration"] = r.configuration;
        rj["model"] = r.model;
        rj["victim_loss_wei"] = to_decimal(r.victim_loss);
        rj["victim_loss"] = ether_text(r.victim_loss);
        rj["expected_wei"] = to_decimal(r.expected);
        rj["ok"] = r.ok();
        if (!r.error.empty()) rj["error"] = r.error;
        j["rows"].push_back(rj);
      }
      j["pass"] = pass;
      out_ << j.dump(2) << "\n";
    } else {
      out_ << std::left << std::setw(18) << "configuration" << std::setw(12) << "model" << std::setw(14)
           << "victim_loss" << std::setw(12) << "expected"
           << "status\n";
      for (const auto& r : rows) {
        out_ << std::setw(18) << r.configuration << std::setw(12) << r.model << std::setw(14)
             << (r.error.empty() ? ether_text(r.victim_loss) : "error") << std::setw(12) << ether_text(r.expected)
             << (r.ok() ? "ok" : "MISMATCH") << "\n";
      }
      out_ << std::right << "\n";
      for (const auto& r : rows) {
        if (!r.error.empty()) {
          out_ << r.configuration << ": failed: " << r.error << "\n";
        } else {
          out_ << r.configuration << ": " << ether_text(r.victim_loss) << " drained\n";
        }
      }
      out_ << "result: " << (pass ? "PASS" : "FAIL") << "\n";
    }
    return pass ? kOk : kDiagnostics;
  }

 private:
  int report_ok(const std::string& line) {
    if (json) {
      ojson j = versioned();
      j["ok"] = true;
      j["diagnostics"] = ojson::array();
      out_ << j.dump(2) << "\n";
    } else {
      out_ << line << "\n";
    }
    return kOk;
  }

  int check_contracts(const fs::path& path, bool naive) {
    auto unit = seq::parse_unit(dsl::read_text_file(path), path.string());
    auto diags = seq::resolve_unit(unit);
    if (!diags.empty()) return diagnostics(diags);
    std::vector<analysis::Finding> findings;
    for (const auto& c : unit.contracts) {
      if (c.is_interface) continue;
      auto f = naive ? analysis::check_effects_after_interaction(c) : analysis::check_with_mutex_awareness(c);
      findings.insert(findings.end(), f.begin(), f.end());
    }
    const std::size_t errors = analysis::count_errors(findings);
    if (json) {
      ojson j = versioned();
      j["rule_set"] = naive ? "naive" : "mutex-aware";
      j["findings"] = ojson::array();
      for (const auto& f : findings) j["findings"].push_back(analysis::to_json(f));
      j["errors"] = errors;
      out_ << j.dump(2) << "\n";
    } else {
      for (const auto& f : findings) out_ << analysis::render(f) << "\n";
      out_ << findings.size() << " finding(s), " << errors << " error(s)\n";
    }
    return errors ? kDiagnostics : kOk;
  }

  int simulate_sequential(const fs::path& path, const SimulateOptions& o) {
    std::vector<seq::SourceUnit> overrides;
    seq::VmOptions vm_opts;
    if (o.max_depth) vm_opts.max_call_depth = *o.max_depth;
    std::optional<seq::ScenarioRun> run;
    seq::Scenario scenario;
    try {
      for (const auto& c : o.contracts) {
        require_file(c);
        overrides.push_back(seq::load_contracts(c));
      }
      scenario = seq::load_scenario(path);
      run.emplace(seq::run_scenario(scenario, overrides, vm_opts));
    } catch (const DiagnosticError& e) {
      return diagnostics(e.diagnostics());
    } catch (const seq::ScenarioError& e) {
      return diagnostics({Diagnostic{{path.string(), 1, 1, 0}, Severity::Error, "ScenarioError", e.what()}});
    }
    if (o.trace) {
      std::ofstream f(*o.trace, std::ios::binary);
      if (!f) throw UsageError("cannot write trace '" + o.trace->string() + "'");
      seq::write_trace_jsonl(f, run->vm.trace());
    }
    std::map<Address, std::string> label;
    std::vector<std::string> order;
    for (const auto& a : scenario.accounts) order.push_back(a.name);
    for (const auto& d : scenario.deployments) order.push_back(d.name);
    for (const auto& [name, addr] : run->names) label[addr] = name;
    auto who = [&](const std::string& ref) {
      if (ref.rfind('@', 0) == 0) return ref.substr(1);
      return ref;
    };

    if (json) {
      ojson j = versioned();
      j["model"] = "sequential";
      j["steps"] = ojson::array();
      for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
        const auto& st = scenario.steps[i];
        const auto& r = run->results[i];
        ojson sj{{"from", who(st.from)}, {"to", who(st.to)}, {"function", st.function},
                 {"value_wei", to_decimal(st.value)}, {"outcome", r.success ? "Success" : "Reverted"}};
        if (r.reason) sj["reason"] = std::string(seq::to_string(*r.reason));
        j["steps"].push_back(sj);
      }
      j["balances_wei"] = ojson::object();
      for (const auto& n : order) j["balances_wei"][n] = to_decimal(run->vm.world().find(run->names.at(n))->balance);
      j["trace_events"] = run->vm.trace().size();
      if (!scenario.victims.empty()) {
        j["victim_loss_wei"] = to_decimal(run->victim_loss);
        j["victim_loss"] = ether_text(run->victim_loss);
      }
      out_ << j.dump(2) << "\n";
    } else {
      for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
        const auto& st = scenario.steps[i];
        const auto& r = run->results[i];
        out_ << "step " << i << ": " << who(st.from) << " -> " << who(st.to) << "."
             << (st.function.empty() ? "fallback" : st.function) << " value=" << ether_text(st.value) << ": "
             << (r.success ? "Success" : "Reverted(" + std::string(seq::to_string(*r.reason)) + ")") << "\n";
      }
      if (!order.empty()) out_ << "balances:\n";
      for (const auto& n : order) out_ << "  " << n << "=" << ether_text(run->vm.world().find(run->names.at(n))->balance) << "\n";
      out_ << "trace events: " << run->vm.trace().size() << "\n";
      if (!scenario.victims.empty()) out_ << "victim_loss=" << ether_text(run->victim_loss) << "\n";
    }
    return kOk;
  }

  int simulate_dataflow(const fs::path& path, const SimulateOptions& o) {
    const std::size_t max_steps = o.max_steps ? *o.max_steps : env_max_steps();
    dataflow::Network net;
    try {
      dataflow::RuntimeOptions ro;
      ro.buffer_capacity = o.buffer_cap;
      net = dataflow::Network::from_decl(dsl::load_network(path), ro);
    } catch (const DiagnosticError& e) {
      return diagnostics(e.diagnostics());
    }
    dataflow::RunResult run;
    try {
      run = dataflow::run_until_quiescent(net, dataflow::SchedulerPolicy::RoundRobin, max_steps);
    } catch (const dataflow::EvalError& e) {
      return diagnostics({Diagnostic{{path.string(), 1, 1, 0}, Severity::Error, "EvalError", e.what()}});
    }
    if (o.trace) {
      std::ofstream f(*o.trace, std::ios::binary);
      if (!f) throw UsageError("cannot write trace '" + o.trace->string() + "'");
      dataflow::write_jsonl(f, run.trace);
    }
    const bool limited = run.termination == dataflow::Termination::StepLimitExceeded;
    const uint256 loss = dataflow::victim_loss(net, run.trace, net.victims);
    if (json) {
      ojson j = versioned();
      j["model"] = "dataflow";
      j["firings"] = run.trace.size();
      j["termination"] = limited ? "StepLimitExceeded" : "Quiescent";
      j["balances_wei"] = ojson::object();
      for (const auto& inst : net.instances) j["balances_wei"][inst.name] = to_decimal(inst.native_balance);
      if (!net.victims.empty()) {
        j["victim_loss_wei"] = to_decimal(loss);
        j["victim_loss"] = ether_text(loss);
      }
      out_ << j.dump(2) << "\n";
    } else {
      out_ << "firings: " << run.trace.size() << "\n";
      out_ << "balances:\n";
      for (const auto& inst : net.instances) out_ << "  " << inst.name << "=" << ether_text(inst.native_balance) << "\n";
      if (!net.victims.empty()) out_ << "victim_loss=" << ether_text(loss) << "\n";
    }
    if (limited) {
      err_ << "error: step limit exceeded: no quiescence within " << max_steps << " steps\n";
      return kDiagnostics;
    }
    return kOk;
  }

  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

fs::path default_fixture_dir() {
  if (const char* v = std::getenv("ACTORFORGE_FIXTURE_DIR"); v && *v) return v;
  return ACTORFORGE_FIXTURE_DIR;
}

std::vector<DemoRow> attack_demo(const fs::path& fixtures) {
  std::vector<DemoRow> rows;
  const uint256 six = uint256(6) * wei_per_ether();
  auto sequential = [&](const std::string& name, const uint256& expected, auto&& overrides) {
    DemoRow row{name, "sequential", 0, expected, ""};
    try {
      auto scenario = seq::load_scenario(fixtures / "dao_attack.scenario");
      row.victim_loss = seq::run_scenario(scenario, overrides()).victim_loss;
    } catch (const DiagnosticError& e) {
      row.error = render(e.first());
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  };
  sequential("vulnerable", six, [] { return std::vector<seq::SourceUnit>{}; });
  sequential("reordered-fix", 0, [&] { return std::vector<seq::SourceUnit>{seq::load_contracts(fixtures / "dao_fixed.sol.txt")}; });
  sequential("generated-mutex", 0, [&] {
    auto decl = dsl::load_actor(fixtures / "dao.actor");
    return std::vector<seq::SourceUnit>{
        seq::parse_contracts(codegen::generate_contract(decl), codegen::output_file_name(fixtures / "dao.actor"))};
  });

  DemoRow df{"dataflow", "dataflow", 0, 0, ""};
  try {
    auto net = dataflow::Network::from_decl(dsl::load_network(fixtures / "dao_attacker.network"));
    auto run = dataflow::run_until_quiescent(net, dataflow::SchedulerPolicy::RoundRobin, 10'000);
    if (run.termination == dataflow::Termination::StepLimitExceeded) df.error = "step limit exceeded";
    df.victim_loss = dataflow::victim_loss(net, run.trace, net.victims);
  } catch (const DiagnosticError& e) {
    df.error = render(e.first());
  } catch (const std::exception& e) {
    df.error = e.what();
  }
  rows.push_back(df);
  return rows;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dataflow actors to re-entrancy-safe contracts, with a sequential contract simulator",
               std::string(kToolName)};
  app.fallthrough();
  App a(out, err);
  bool version = false;
  app.add_flag("--json", a.json, "Machine-readable output");
  app.add_flag("--version", version, "Print the version and exit");

  fs::path path;
  auto* parse = app.add_subcommand("parse", "Parse an .actor, .network, .sol.txt or .scenario file");
  parse->add_option("path", path, "Input file")->required();

  bool naive = false;
  auto* check = app.add_subcommand("check", "Resolve an actor or network, or lint contracts for re-entrancy");
  check->add_option("path", path, "Input file")->required();
  check->add_flag("--naive", naive, "Report every write after an interaction, ignoring locks");

  std::optional<fs::path> script;
  std::size_t firings = 20;
  auto* classify = app.add_subcommand("classify", "Classify an actor as Static, CycloStatic or Dynamic");
  classify->add_option("path", path, "Actor file")->required();
  classify->add_option("--script", script, "JSON input script for observed rates");
  classify->add_option("--firings", firings, "Firings to observe with --script");

  fs::path out_dir = ".";
  fs::path fixtures = default_fixture_dir();
  auto* compile = app.add_subcommand("compile", "Generate a locked contract from an actor and verify it");
  compile->add_option("path", path, "Actor file")->required();
  compile->add_option("--out", out_dir, "Output directory");
  compile->add_option("--fixtures", fixtures, "Directory of scenarios to replay");

  App::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario (sequential) or a network (dataflow)");
  simulate->add_option("path", path, "Scenario or network file")->required();
  simulate->add_option("--model", sim.model, "sequential or dataflow")->check(CLI::IsMember({"sequential", "dataflow"}));
  simulate->add_option("--max-steps", sim.max_steps, "Dataflow firing budget (default ACTORFORGE_MAX_STEPS or 10000)");
  simulate->add_option("--trace", sim.trace, "Write the JSONL trace here");
  simulate->add_option("--buffer-cap", sim.buffer_cap, "Dataflow buffer capacity");
  simulate->add_option("--max-depth", sim.max_depth, "Sequential call depth limit");
  simulate->add_option("--contract", sim.contracts, "Contract file replacing same-named scenario contracts");

  auto* demo = app.add_subcommand("attack-demo", "Compare the attack across the four bundled configurations");
  demo->add_option("--fixtures", fixtures, "Fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (version) {
      if (a.json) {
        out << versioned().dump(2) << "\n";
      } else {
        out << kToolName << " " << kVersion << "\n";
      }
      return kOk;
    }
    if (parse->parsed()) return a.parse(path);
    if (check->parsed()) return a.check(path, naive);
    if (classify->parsed()) return a.classify(path, script, firings);
    if (compile->parsed()) return a.compile(path, out_dir, fixtures);
    if (simulate->parsed()) return a.simulate(path, sim);
    if (demo->parsed()) return a.attack_demo_cmd(fixtures);
    err << app.help();
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DiagnosticError& e) {
    return a.diagnostics(e.diagnostics());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace actorforge::cli
