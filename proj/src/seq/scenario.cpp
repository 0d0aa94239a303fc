// SPDX-License-Identifier: Apache-2.0
#include "actorforge/seq/scenario.hpp"

#include "actorforge/dsl/frontend.hpp"
#include "actorforge/seq/frontend.hpp"

#include <ostream>

namespace actorforge::seq {

namespace {

using nlohmann::json;

std::string get_string(const json& obj, const char* key, const char* where, bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw ScenarioError(std::string(where) + ": missing field '" + key + "'");
    return {};
  }
  if (!it->is_string()) throw ScenarioError(std::string(where) + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

uint256 get_amount(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) return 0;
  if (it->is_number_unsigned()) return uint256(it->get<std::uint64_t>());
  if (it->is_string()) {
    if (auto v = parse_decimal(it->get<std::string>())) return *v;
  }
  throw ScenarioError(std::string(where) + ": '" + key + "' must be a decimal wei string");
}

std::vector<json> get_args(const json& obj, const char* where) {
  auto it = obj.find("args");
  if (it == obj.end()) return {};
  if (!it->is_array()) throw ScenarioError(std::string(where) + ": 'args' must be an array");
  return it->get<std::vector<json>>();
}

const json& get_array(const json& root, const char* key) {
  static const json empty = json::array();
  auto it = root.find(key);
  if (it == root.end()) return empty;
  if (!it->is_array()) throw ScenarioError(std::string("'") + key + "' must be an array");
  return *it;
}

class Names {
 public:
  void declare(const std::string& name, const std::string& where) {
    if (name.empty()) throw ScenarioError(where + ": empty name");
    if (!names_.insert(name).second) throw ScenarioError(where + ": name '" + name + "' declared twice");
  }
  void check_ref(const std::string& ref, const std::string& where) const {
    if (ref.rfind('@', 0) == 0) {
      if (!names_.count(ref.substr(1))) throw ScenarioError(where + ": '" + ref + "' is used before it is declared");
    } else if (!Address::parse(ref)) {
      throw ScenarioError(where + ": '" + ref + "' is neither a @name nor an address");
    }
  }
  void check_arg(const json& arg, const std::string& where) const {
    if (arg.is_string()) {
      const auto s = arg.get<std::string>();
      if (s.rfind('@', 0) == 0) check_ref(s, where);
    }
  }

 private:
  std::set<std::string> names_;
};

Address resolve_ref(const std::map<std::string, Address>& names, const std::string& ref) {
  if (ref.rfind('@', 0) == 0) {
    auto it = names.find(ref.substr(1));
    if (it == names.end()) throw ScenarioError("unknown name '" + ref + "'");
    return it->second;
  }
  if (auto a = Address::parse(ref)) return *a;
  throw ScenarioError("'" + ref + "' is not an address");
}

Value to_value(const std::map<std::string, Address>& names, const json& arg) {
  if (arg.is_boolean()) return arg.get<bool>();
  if (arg.is_number_unsigned()) return uint256(arg.get<std::uint64_t>());
  if (arg.is_string()) {
    const auto s = arg.get<std::string>();
    if (s.rfind('@', 0) == 0 || s.rfind("0x", 0) == 0) return resolve_ref(names, s);
    if (auto v = parse_decimal(s)) return *v;
  }
  throw ScenarioError("unsupported argument " + arg.dump());
}

}  // namespace

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ScenarioError("scenario must be a JSON object");

  Scenario s;
  Names names;
  for (const auto& src : get_array(root, "sources")) {
    if (!src.is_string()) throw ScenarioError("'sources' entries must be strings");
    s.sources.push_back(base_dir / src.get<std::string>());
  }
  for (const auto& a : get_array(root, "accounts")) {
    ScenarioAccount acct;
    acct.name = get_string(a, "name", "account");
    const std::string where = "account '" + acct.name + "'";
    auto addr = Address::parse(get_string(a, "address", where.c_str()));
    if (!addr || addr->is_zero()) throw ScenarioError(where + ": invalid address");
    acct.address = *addr;
    acct.balance = get_amount(a, "balance", where.c_str());
    names.declare(acct.name, where);
    s.accounts.push_back(std::move(acct));
  }
  for (const auto& d : get_array(root, "deployments")) {
    ScenarioDeployment dep;
    dep.name = get_string(d, "name", "deployment");
    const std::string where = "deployment '" + dep.name + "'";
    dep.contract = get_string(d, "contract", where.c_str());
    dep.deployer = get_string(d, "deployer", where.c_str());
    dep.args = get_args(d, where.c_str());
    dep.endowment = get_amount(d, "endowment", where.c_str());
    names.check_ref(dep.deployer, where);
    for (const auto& arg : dep.args) names.check_arg(arg, where);
    names.declare(dep.name, where);
    s.deployments.push_back(std::move(dep));
  }
  std::size_t index = 0;
  for (const auto& st : get_array(root, "steps")) {
    const std::string where = "step " + std::to_string(index++);
    ScenarioStep step;
    step.from = get_string(st, "from", where.c_str());
    step.to = get_string(st, "to", where.c_str());
    step.function = get_string(st, "function", where.c_str(), false);
    step.value = get_amount(st, "value", where.c_str());
    step.args = get_args(st, where.c_str());
    names.check_ref(step.from, where);
    names.check_ref(step.to, where);
    for (const auto& arg : step.args) names.check_arg(arg, where);
    s.steps.push_back(std::move(step));
  }
  for (const auto& v : get_array(root, "victims")) {
    if (!v.is_string()) throw ScenarioError("'victims' entries must be strings");
    names.check_ref(v.get<std::string>(), "victims");
    s.victims.push_back(v.get<std::string>());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::string text;
  try {
    text = dsl::read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw ScenarioError(e.what());
  }
  return parse_scenario(text, path.parent_path());
}

ScenarioRun run_scenario(const Scenario& scenario, const std::vector<SourceUnit>& overrides, VmOptions options) {
  std::map<std::string, std::shared_ptr<const ContractDef>> contracts;
  for (const auto& path : scenario.sources) {
    SourceUnit unit;
    try {
      unit = load_contracts(path);
    } catch (const DiagnosticError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw ScenarioError(e.what());
    }
    for (auto& c : unit.contracts) {
      std::string name = c.name;
      contracts[name] = std::make_shared<const ContractDef>(std::move(c));
    }
  }
  for (const auto& unit : overrides) {
    for (const auto& c : unit.contracts) contracts[c.name] = std::make_shared<const ContractDef>(c);
  }

  ScenarioRun run(options);
  for (const auto& a : scenario.accounts) {
    if (run.vm.world().find(a.address)) throw ScenarioError("account '" + a.name + "' reuses an address");
    run.vm.add_wallet(a.address, a.balance, a.name);
    run.names[a.name] = a.address;
  }
  for (const auto& d : scenario.deployments) {
    auto it = contracts.find(d.contract);
    if (it == contracts.end()) throw ScenarioError("deployment '" + d.name + "': no contract named '" + d.contract + "'");
    std::vector<Value> args;
    for (const auto& a : d.args) args.push_back(to_value(run.names, a));
    try {
      run.names[d.name] = run.vm.deploy(resolve_ref(run.names, d.deployer), it->second, args, d.endowment, d.name);
    } catch (const DeployError& e) {
      throw ScenarioError("deployment '" + d.name + "': " + e.what());
    }
  }
  for (const auto& st : scenario.steps) {
    std::vector<Value> args;
    for (const auto& a : st.args) args.push_back(to_value(run.names, a));
    run.step_starts.push_back(run.vm.trace().size());
    run.results.push_back(
        run.vm.call(resolve_ref(run.names, st.from), resolve_ref(run.names, st.to), st.function, args, st.value));
  }
  for (const auto& v : scenario.victims) run.victims.insert(resolve_ref(run.names, v));
  run.victim_loss = victim_loss(run.vm.trace(), run.victims);
  return run;
}

void write_trace_jsonl(std::ostream& os, const std::vector<TraceEvent>& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    nlohmann::ordered_json j;
    j["seq"] = i;
    const auto event = to_json(trace[i]);
    for (const auto& item : event.items()) j[item.key()] = item.value();
    os << j.dump() << '\n';
  }
}

}  // namespace actorforge::seq
