// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dataflow/classify.hpp"

#include "actorforge/dataflow/runtime.hpp"

#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace actorforge::dataflow {

namespace {

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

bool guards_inspect_data(const dsl::ActionDecl& a) {
  bool found = false;
  for (const auto& g : a.guards) {
    dsl::visit_exprs(g, [&](const dsl::Expr& e) {
      if (const auto* n = std::get_if<dsl::NameRef>(&e.node)) {
        if (n->binding == dsl::Binding::State || n->binding == dsl::Binding::Pattern) found = true;
      } else if (std::holds_alternative<dsl::Index>(e.node)) {
        found = true;
      }
    });
  }
  return found;
}

std::size_t cycle_length(const dsl::ActionDecl& a) {
  std::size_t len = 1;
  for (const auto& c : a.consumes) len = std::lcm(len, c.counts.size());
  return len;
}

std::vector<RateVector> minimize(std::vector<RateVector> seq) {
  const std::size_t n = seq.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = seq[i] == seq[i % p];
    if (ok) {
      seq.resize(p);
      break;
    }
  }
  return seq;
}

Classification from_sequence(std::vector<RateVector> seq) {
  Classification c;
  c.signature.sequence = minimize(std::move(seq));
  c.kind = c.signature.period() == 1 ? ActorClass::Static : ActorClass::CycloStatic;
  return c;
}

Classification dynamic(std::string reason) {
  Classification c;
  c.kind = ActorClass::Dynamic;
  c.reason = std::move(reason);
  return c;
}

std::optional<std::size_t> action_index(const dsl::ActorDecl& decl, const std::string& name) {
  for (std::size_t i = 0; i < decl.actions.size(); ++i) {
    if (decl.actions[i].name == name) return i;
  }
  return std::nullopt;
}

}  // namespace

std::string RateVector::str() const { return "(" + join(consumption) + ";" + join(production) + ")"; }

std::string_view to_string(ActorClass c) {
  switch (c) {
    case ActorClass::Static:
      return "Static";
    case ActorClass::CycloStatic:
      return "CycloStatic";
    case ActorClass::Dynamic:
      return "Dynamic";
  }
  return "?";
}

std::string Classification::str() const {
  std::string s(to_string(kind));
  if (kind == ActorClass::Static) {
    s += " " + signature.sequence.front().str();
  } else if (kind == ActorClass::CycloStatic) {
    s += " period=" + std::to_string(signature.period()) + " [";
    for (std::size_t i = 0; i < signature.sequence.size(); ++i) {
      if (i) s += ", ";
      s += signature.sequence[i].str();
    }
    s += "]";
  }
  return s;
}

RateVector action_rates(const dsl::ActorDecl& decl, std::size_t action, std::size_t phase) {
  const auto& a = decl.actions.at(action);
  RateVector v;
  for (const auto& p : decl.inputs) {
    std::uint64_t n = 0;
    for (const auto& c : a.consumes) {
      if (c.port == p.name) n = c.counts[phase % c.counts.size()];
    }
    v.consumption.push_back(n);
  }
  for (const auto& p : decl.outputs) {
    std::uint64_t n = 0;
    for (const auto& st : a.body) {
      if (const auto* em = std::get_if<dsl::Emit>(&st); em && em->port == p.name) n += em->values.size();
    }
    v.production.push_back(n);
  }
  return v;
}

Classification classify_actor(const dsl::ActorDecl& decl) {
  if (decl.actions.empty()) {
    Classification c;
    c.kind = ActorClass::Static;
    c.signature.sequence.push_back(RateVector{std::vector<std::uint64_t>(decl.inputs.size(), 0),
                                              std::vector<std::uint64_t>(decl.outputs.size(), 0)});
    return c;
  }
  for (const auto& a : decl.actions) {
    if (guards_inspect_data(a)) return dynamic("guards of '" + a.name + "' inspect token values or state");
  }

  if (!decl.schedule) {
    if (decl.actions.size() == 1) {
      std::vector<RateVector> seq;
      for (std::size_t ph = 0; ph < cycle_length(decl.actions[0]); ++ph) seq.push_back(action_rates(decl, 0, ph));
      return from_sequence(std::move(seq));
    }
    RateVector first = action_rates(decl, 0);
    for (std::size_t i = 0; i < decl.actions.size(); ++i) {
      if (cycle_length(decl.actions[i]) != 1 || action_rates(decl, i) != first) {
        return dynamic("actions compete with different rates");
      }
    }
    return from_sequence({first});
  }

  const auto& fsm = *decl.schedule;
  std::map<std::string, const dsl::Transition*> next;
  for (const auto& t : fsm.transitions) {
    if (!next.emplace(t.from, &t).second) return dynamic("schedule state '" + t.from + "' has several successors");
  }
  std::vector<RateVector> seq;
  std::set<std::string> seen;
  std::string state = fsm.initial;
  while (seen.insert(state).second) {
    auto it = next.find(state);
    if (it == next.end()) return dynamic("schedule dead-ends in state '" + state + "'");
    auto idx = action_index(decl, it->second->action);
    if (!idx) return dynamic("schedule names unknown action '" + it->second->action + "'");
    if (cycle_length(decl.actions[*idx]) != 1) return dynamic("scheduled action has a cyclic rate");
    seq.push_back(action_rates(decl, *idx));
    state = it->second->to;
  }
  if (state != fsm.initial) return dynamic("initial schedule state is not on the cycle");
  return from_sequence(std::move(seq));
}

InputScript parse_input_script(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("input script must be a JSON array");
  InputScript script;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("port") || !item.at("port").is_string()) {
      throw std::invalid_argument("script entry needs a string \"port\": " + item.dump());
    }
    nlohmann::json tok = item;
    tok.erase("port");
    script.emplace_back(item.at("port").get<std::string>(), token_from_json(tok));
  }
  return script;
}

std::vector<RateVector> simulate_rates(const dsl::ActorDecl& decl, const InputScript& script, std::size_t n_firings) {
  Network net = Network::isolated(decl, script);
  Scheduler sched(SchedulerPolicy::FirstFireable);
  std::map<std::string, std::size_t> in_pos;
  std::map<std::string, std::size_t> out_pos;
  for (std::size_t i = 0; i < decl.inputs.size(); ++i) {
    in_pos[net.buffers[net.input_buffers[0].at(decl.inputs[i].name)].id] = i;
  }
  for (std::size_t i = 0; i < decl.outputs.size(); ++i) {
    out_pos[net.buffers[net.output_buffers[0].at(decl.outputs[i].name)].id] = i;
  }
  std::vector<RateVector> observed;
  while (observed.size() < n_firings) {
    auto rec = step_network(net, sched);
    if (!rec) break;
    RateVector v{std::vector<std::uint64_t>(decl.inputs.size(), 0),
                 std::vector<std::uint64_t>(decl.outputs.size(), 0)};
    for (const auto& [buf, tok] : rec->consumed) ++v.consumption[in_pos.at(buf)];
    for (const auto& [buf, tok] : rec->produced) ++v.production[out_pos.at(buf)];
    observed.push_back(std::move(v));
  }
  return observed;
}

}  // namespace actorforge::dataflow
