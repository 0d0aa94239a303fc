// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dataflow/runtime.hpp"

#include "actorforge/dsl/frontend.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace actorforge::dataflow {

namespace {

using dsl::ActionDecl;
using dsl::ActorDecl;
using dsl::Binding;
using dsl::Expr;
using dsl::Type;

Value default_value(Type t) {
  switch (t) {
    case Type::Uint:
    case Type::Msg:
      return uint256(0);
    case Type::Bool:
      return false;
    case Type::Address:
      return Address{};
    case Type::Map:
      return UintMap{};
  }
  return uint256(0);
}

Value to_value(const TokenValue& t) {
  return std::visit(
      [](const auto& v) -> Value {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MsgToken>) {
          return v.value;
        } else {
          return v;
        }
      },
      t);
}

TokenValue to_token(const Value& v) {
  if (auto* u = std::get_if<uint256>(&v)) return *u;
  if (auto* b = std::get_if<bool>(&v)) return *b;
  if (auto* a = std::get_if<Address>(&v)) return *a;
  throw EvalError("a map cannot be emitted as a token");
}

// Evaluation context for one firing. Guards and emissions read `input`;
// assignments and lets read `work`.
struct Env {
  const ActorInstance* input = nullptr;
  const ActorInstance* work = nullptr;
  std::map<std::string, Value> patterns;
  std::map<std::string, Value> locals;
};

template <class T>
const T& as(const Value& v, const char* what) {
  if (auto* p = std::get_if<T>(&v)) return *p;
  throw EvalError(std::string("type mismatch: expected ") + what + ", got " + describe(v));
}

uint256 arith(dsl::BinaryOp op, const uint256& a, const uint256& b) {
  try {
    switch (op) {
      case dsl::BinaryOp::Add:
        return checked_add(a, b);
      case dsl::BinaryOp::Sub:
        return checked_sub(a, b);
      case dsl::BinaryOp::Mul:
        return checked_mul(a, b);
      case dsl::BinaryOp::Div:
        return checked_div(a, b);
      case dsl::BinaryOp::Mod:
        return checked_mod(a, b);
      default:
        break;
    }
  } catch (const ArithmeticError& e) {
    throw EvalError(std::string("arithmetic ") + e.what());
  }
  throw EvalError("not an arithmetic operator");
}

Value eval(const Expr& e, const Env& env, bool read_input);

const Value& read_name(const std::string& name, Binding binding, const Env& env, bool read_input) {
  switch (binding) {
    case Binding::State: {
      const ActorInstance& src = read_input ? *env.input : *env.work;
      auto it = src.state.find(name);
      if (it == src.state.end()) throw EvalError("unknown state variable '" + name + "'");
      return it->second;
    }
    case Binding::Pattern: {
      auto it = env.patterns.find(name);
      if (it == env.patterns.end()) throw EvalError("pattern variable '" + name + "' is not bound");
      return it->second;
    }
    case Binding::Local: {
      auto it = env.locals.find(name);
      if (it == env.locals.end()) throw EvalError("local '" + name + "' read before assignment");
      return it->second;
    }
    case Binding::Unresolved:
      break;
  }
  throw EvalError("identifier '" + name + "' was never resolved");
}

Value eval(const Expr& e, const Env& env, bool read_input) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, dsl::IntLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, dsl::BoolLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, dsl::AddrLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, dsl::NameRef>) {
          return read_name(n.name, n.binding, env, read_input);
        } else if constexpr (std::is_same_v<T, dsl::Index>) {
          const auto& m = as<UintMap>(read_name(n.map, n.binding, env, read_input), "map");
          const auto& k = eval(*n.key, env, read_input);
          return map_get(m, as<Address>(k, "address"));
        } else if constexpr (std::is_same_v<T, dsl::Unary>) {
          return !as<bool>(eval(*n.operand, env, read_input), "bool");
        } else {
          using dsl::BinaryOp;
          if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
            bool l = as<bool>(eval(*n.lhs, env, read_input), "bool");
            if (n.op == BinaryOp::And && !l) return false;
            if (n.op == BinaryOp::Or && l) return true;
            return as<bool>(eval(*n.rhs, env, read_input), "bool");
          }
          Value l = eval(*n.lhs, env, read_input);
          Value r = eval(*n.rhs, env, read_input);
          switch (n.op) {
            case BinaryOp::Eq:
              return l == r;
            case BinaryOp::Ne:
              return l != r;
            case BinaryOp::Lt:
              return as<uint256>(l, "uint") < as<uint256>(r, "uint");
            case BinaryOp::Le:
              return as<uint256>(l, "uint") <= as<uint256>(r, "uint");
            case BinaryOp::Gt:
              return as<uint256>(l, "uint") > as<uint256>(r, "uint");
            case BinaryOp::Ge:
              return as<uint256>(l, "uint") >= as<uint256>(r, "uint");
            default:
              return arith(n.op, as<uint256>(l, "uint"), as<uint256>(r, "uint"));
          }
        }
      },
      e.node);
}

std::size_t cycle_length(const ActionDecl& a) {
  std::size_t len = 1;
  for (const auto& c : a.consumes) len = std::lcm(len, c.counts.size());
  return len;
}

std::size_t rate_at(const dsl::Consume& c, std::size_t phase) { return c.counts[phase % c.counts.size()]; }

const dsl::PortDecl& port_of(const ActorDecl& decl, const std::string& name) {
  const auto* p = decl.find_port(name);
  if (!p) throw EvalError("unknown port '" + name + "'");
  return *p;
}

// Binds pattern variables for the tokens taken by each consume clause and
// credits the value carried by msg tokens.
void bind_inputs(const ActionDecl& action, const ActorDecl& decl, std::span<const std::vector<TokenValue>> inputs,
                 Env& env, ActorInstance* credit) {
  for (std::size_t i = 0; i < action.consumes.size(); ++i) {
    const auto& c = action.consumes[i];
    const auto& toks = inputs[i];
    if (port_of(decl, c.port).token_type == Type::Msg) {
      if (toks.empty()) continue;
      const auto* m = std::get_if<MsgToken>(&toks.front());
      if (!m) throw EvalError("port '" + c.port + "' expects msg tokens, got " + describe(toks.front()));
      env.patterns[std::string(dsl::kSenderVar)] = m->sender;
      env.patterns[std::string(dsl::kValueVar)] = m->value;
      if (credit) {
        try {
          credit->native_balance = checked_add(credit->native_balance, m->value);
        } catch (const ArithmeticError& e) {
          throw EvalError(std::string("native balance ") + e.what());
        }
      }
      continue;
    }
    for (std::size_t k = 0; k < c.patterns.size() && k < toks.size(); ++k) {
      env.patterns[c.patterns[k]] = to_value(toks[k]);
    }
  }
}

const dsl::Transition* transition_for(const ActorInstance& inst, const std::string& action) {
  const auto& fsm = inst.decl->schedule;
  if (!fsm || !inst.fsm_state) return nullptr;
  for (const auto& t : fsm->transitions) {
    if (t.from == *inst.fsm_state && t.action == action) return &t;
  }
  return nullptr;
}

std::map<std::string, std::size_t> production_counts(const ActionDecl& a) {
  std::map<std::string, std::size_t> out;
  for (const auto& st : a.body) {
    if (const auto* em = std::get_if<dsl::Emit>(&st)) out[em->port] += em->values.size();
  }
  return out;
}

}  // namespace

ActorInstance instantiate(std::shared_ptr<const dsl::ActorDecl> decl, std::string name, Address address,
                          uint256 native_balance) {
  ActorInstance inst;
  inst.name = std::move(name);
  inst.address = address;
  inst.native_balance = native_balance;
  Env env;
  env.input = &inst;
  env.work = &inst;
  for (const auto& v : decl->state_vars) {
    inst.state[v.name] = v.initializer ? eval(*v.initializer, env, true) : default_value(v.var_type);
  }
  if (decl->schedule) inst.fsm_state = decl->schedule->initial;
  inst.phases.assign(decl->actions.size(), 0);
  inst.decl = std::move(decl);
  return inst;
}

std::optional<std::size_t> Network::find_instance(std::string_view name) const {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].name == name) return i;
  }
  return std::nullopt;
}

uint256 Network::total_value() const {
  uint256 sum = 0;
  for (const auto& i : instances) sum += i.native_balance;
  for (const auto& b : buffers) {
    for (const auto& t : b.tokens) sum += carried_value(t);
  }
  return sum;
}

void Network::add_instance(ActorInstance inst) {
  instances.push_back(std::move(inst));
  input_buffers.emplace_back();
  output_buffers.emplace_back();
}

std::size_t Network::add_buffer(std::string id, std::optional<std::size_t> capacity,
                                std::optional<std::size_t> target) {
  Buffer b;
  b.id = std::move(id);
  b.capacity = capacity;
  b.target = target;
  buffers.push_back(std::move(b));
  return buffers.size() - 1;
}

Network Network::from_decl(const dsl::NetworkDecl& decl, const RuntimeOptions& options) {
  Network net;
  std::map<std::string, std::shared_ptr<const ActorDecl>> shared;
  for (const auto& [name, actor] : decl.actors) shared[name] = std::make_shared<const ActorDecl>(actor);

  for (std::size_t i = 0; i < decl.instances.size(); ++i) {
    const auto& d = decl.instances[i];
    auto it = shared.find(d.actor);
    if (it == shared.end()) throw EvalError("instance '" + d.name + "' uses unknown actor '" + d.actor + "'");
    net.add_instance(instantiate(it->second, d.name, Address::from_index(i + 1), d.balance));
  }

  for (const auto& c : decl.connections) {
    auto from = net.find_instance(c.from.instance);
    auto to = net.find_instance(c.to.instance);
    if (!from || !to) throw EvalError("connection " + c.from.str() + " -> " + c.to.str() + " names an unknown instance");
    auto cap = c.capacity ? c.capacity : options.buffer_capacity;
    std::size_t b = net.add_buffer(c.from.str() + "->" + c.to.str(), cap, *to);
    net.output_buffers[*from][c.from.port] = b;
    net.input_buffers[*to][c.to.port] = b;
  }

  for (std::size_t i = 0; i < net.instances.size(); ++i) {
    const auto& inst = net.instances[i];
    for (const auto& p : inst.decl->inputs) {
      if (!net.input_buffers[i].count(p.name)) {
        net.input_buffers[i][p.name] = net.add_buffer("(open)->" + inst.name + "." + p.name, std::nullopt, i);
      }
    }
    for (const auto& p : inst.decl->outputs) {
      if (!net.output_buffers[i].count(p.name)) {
        net.output_buffers[i][p.name] =
            net.add_buffer(inst.name + "." + p.name + "->(open)", std::nullopt, std::nullopt);
      }
    }
  }

  for (const auto& f : decl.feeds) {
    auto inst = net.find_instance(f.target.instance);
    if (!inst) throw EvalError("feed targets unknown instance '" + f.target.instance + "'");
    auto& buf = net.buffers[net.input_buffers[*inst].at(f.target.port)];
    for (const auto& t : f.tokens) buf.tokens.push_back(t);
  }

  net.victims.insert(decl.victims.begin(), decl.victims.end());
  return net;
}

Network Network::isolated(dsl::ActorDecl decl, std::span<const std::pair<std::string, TokenValue>> script,
                          uint256 native_balance) {
  Network net;
  auto shared = std::make_shared<const ActorDecl>(std::move(decl));
  net.add_instance(instantiate(shared, shared->name, Address::from_index(1), native_balance));
  for (const auto& p : shared->inputs) {
    net.input_buffers[0][p.name] = net.add_buffer("(script)->" + p.name, std::nullopt, 0);
  }
  for (const auto& p : shared->outputs) {
    net.output_buffers[0][p.name] = net.add_buffer(p.name + "->(open)", std::nullopt, std::nullopt);
  }
  for (const auto& [port, tok] : script) {
    auto it = net.input_buffers[0].find(port);
    if (it == net.input_buffers[0].end()) throw EvalError("script feeds unknown input port '" + port + "'");
    net.buffers[it->second].tokens.push_back(tok);
  }
  return net;
}

std::vector<std::vector<TokenValue>> peek_inputs(const Network& net, std::size_t instance, std::size_t action) {
  const auto& inst = net.instances.at(instance);
  const auto& a = inst.decl->actions.at(action);
  std::vector<std::vector<TokenValue>> out;
  for (const auto& c : a.consumes) {
    const auto& buf = net.buffers[net.input_buffers[instance].at(c.port)];
    std::size_t n = std::min(rate_at(c, inst.phases[action]), buf.tokens.size());
    out.emplace_back(buf.tokens.begin(), buf.tokens.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

FiringOutcome evaluate_firing(const ActorInstance& before, std::size_t action,
                              std::span<const std::vector<TokenValue>> inputs) {
  const auto& decl = *before.decl;
  const auto& a = decl.actions.at(action);
  if (inputs.size() != a.consumes.size()) throw EvalError("wrong number of input groups for '" + a.name + "'");

  FiringOutcome out{before, {}};
  ActorInstance& work = out.after;
  Env env;
  env.input = &before;
  env.work = &work;
  bind_inputs(a, decl, inputs, env, &work);

  for (const auto& st : a.body) {
    if (const auto* s = std::get_if<dsl::Assign>(&st)) {
      Value v = eval(s->value, env, false);
      auto it = work.state.find(s->target);
      if (it == work.state.end()) throw EvalError("unknown state variable '" + s->target + "'");
      if (s->key) {
        Address k = as<Address>(eval(*s->key, env, false), "address");
        as<UintMap>(it->second, "map");
        std::get<UintMap>(it->second)[k] = as<uint256>(v, "uint");
      } else {
        it->second = std::move(v);
      }
    } else if (const auto* l = std::get_if<dsl::Let>(&st)) {
      env.locals[l->name] = eval(l->value, env, false);
    } else {
      const auto& em = std::get<dsl::Emit>(st);
      bool msg = port_of(decl, em.port).token_type == Type::Msg;
      for (const auto& e : em.values) {
        Value v = eval(e, env, true);
        if (msg) {
          const auto& amount = as<uint256>(v, "uint");
          if (amount > work.native_balance) {
            throw EvalError("insufficient native balance: " + to_decimal(work.native_balance) + " < " +
                            to_decimal(amount));
          }
          work.native_balance -= amount;
          out.produced.emplace_back(em.port, MsgToken{before.address, amount});
        } else {
          out.produced.emplace_back(em.port, to_token(v));
        }
      }
    }
  }

  work.phases[action] = (before.phases[action] + 1) % cycle_length(a);
  if (decl.schedule) {
    const auto* t = transition_for(before, a.name);
    if (!t) throw EvalError("schedule does not allow '" + a.name + "' in state '" + before.fsm_state.value_or("") + "'");
    work.fsm_state = t->to;
  }
  return out;
}

bool can_fire(const Network& net, std::size_t instance, std::size_t action, std::string* error) {
  const auto& inst = net.instances.at(instance);
  const auto& a = inst.decl->actions.at(action);
  if (inst.decl->schedule && !transition_for(inst, a.name)) return false;
  for (const auto& c : a.consumes) {
    const auto& buf = net.buffers[net.input_buffers[instance].at(c.port)];
    if (buf.tokens.size() < rate_at(c, inst.phases[action])) return false;
  }
  for (const auto& [port, n] : production_counts(a)) {
    if (!net.buffers[net.output_buffers[instance].at(port)].has_room(n)) return false;
  }
  auto inputs = peek_inputs(net, instance, action);
  Env env;
  env.input = &inst;
  env.work = &inst;
  try {
    bind_inputs(a, *inst.decl, inputs, env, nullptr);
    for (const auto& g : a.guards) {
      if (!as<bool>(eval(g, env, true), "bool")) return false;
    }
  } catch (const EvalError& e) {
    if (error) *error = inst.name + "." + a.name + ": " + e.what();
    return false;
  }
  return true;
}

FiringRecord fire(Network& net, std::size_t instance, std::size_t action, std::size_t step) {
  std::string why;
  if (!can_fire(net, instance, action, &why)) {
    const auto& inst = net.instances.at(instance);
    throw EvalError(why.empty() ? inst.name + "." + inst.decl->actions.at(action).name + " is not fireable" : why);
  }
  auto& inst = net.instances[instance];
  const auto& a = inst.decl->actions[action];
  auto inputs = peek_inputs(net, instance, action);
  FiringOutcome outcome = evaluate_firing(inst, action, inputs);

  // Everything below is infallible: the firing commits as a whole.
  FiringRecord rec;
  rec.step = step;
  rec.actor = inst.name;
  rec.action = a.name;
  rec.state_before = state_hash(inst);
  for (std::size_t i = 0; i < a.consumes.size(); ++i) {
    auto& buf = net.buffers[net.input_buffers[instance].at(a.consumes[i].port)];
    for (const auto& t : inputs[i]) {
      rec.consumed.emplace_back(buf.id, t);
      buf.tokens.pop_front();
    }
  }
  inst = std::move(outcome.after);
  for (auto& [port, tok] : outcome.produced) {
    auto& buf = net.buffers[net.output_buffers[instance].at(port)];
    rec.produced.emplace_back(buf.id, tok);
    buf.tokens.push_back(std::move(tok));
  }
  rec.state_after = state_hash(inst);
  return rec;
}

std::string canonical_state(const ActorInstance& inst) {
  std::string s = inst.name + "@" + inst.address.hex();
  for (const auto& v : inst.decl->state_vars) {
    s += ";" + v.name + "=" + describe(inst.state.at(v.name));
  }
  s += ";#native=" + to_decimal(inst.native_balance);
  s += ";#fsm=" + inst.fsm_state.value_or("-");
  s += ";#phases=";
  for (std::size_t p : inst.phases) s += std::to_string(p) + ",";
  return s;
}

std::uint64_t state_hash(const ActorInstance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_state(inst)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<FiringRecord> step_network(Network& net, Scheduler& scheduler) {
  const std::size_t n = net.instances.size();
  const std::size_t start = scheduler.policy_ == SchedulerPolicy::RoundRobin ? scheduler.cursor_ : 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = (start + k) % n;
    for (std::size_t a = 0; a < net.instances[i].decl->actions.size(); ++a) {
      if (!can_fire(net, i, a)) continue;
      FiringRecord rec;
      try {
        rec = fire(net, i, a, scheduler.steps_);
      } catch (const EvalError&) {
        continue;
      }
      scheduler.cursor_ = (i + 1) % n;
      ++scheduler.steps_;
      return rec;
    }
  }
  return std::nullopt;
}

bool is_quiescent(const Network& net) {
  for (std::size_t i = 0; i < net.instances.size(); ++i) {
    for (std::size_t a = 0; a < net.instances[i].decl->actions.size(); ++a) {
      if (can_fire(net, i, a)) {
        // A fireable action whose body fails does not count as progress.
        try {
          evaluate_firing(net.instances[i], a, peek_inputs(net, i, a));
          return false;
        } catch (const EvalError&) {
        }
      }
    }
  }
  return true;
}

RunResult run_until_quiescent(Network& net, SchedulerPolicy policy, std::size_t max_steps) {
  RunResult result;
  Scheduler sched(policy);
  while (result.trace.size() < max_steps) {
    auto rec = step_network(net, sched);
    if (!rec) return result;
    result.trace.push_back(std::move(*rec));
  }
  result.termination = is_quiescent(net) ? Termination::Quiescent : Termination::StepLimitExceeded;
  return result;
}

nlohmann::ordered_json to_json(const FiringRecord& r) {
  auto tokens = [](const std::vector<std::pair<std::string, TokenValue>>& list) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [buf, tok] : list) {
      nlohmann::ordered_json j;
      j["buffer"] = buf;
      j["token"] = actorforge::to_json(tok);
      arr.push_back(std::move(j));
    }
    return arr;
  };
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["actor"] = r.actor;
  j["action"] = r.action;
  j["consumed"] = tokens(r.consumed);
  j["produced"] = tokens(r.produced);
  j["state_before"] = hex_digest(r.state_before);
  j["state_after"] = hex_digest(r.state_after);
  return j;
}

void write_jsonl(std::ostream& os, std::span<const FiringRecord> trace) {
  for (const auto& r : trace) os << to_json(r).dump() << '\n';
}

uint256 victim_loss(const Network& net, std::span<const FiringRecord> trace, const std::set<std::string>& victims) {
  std::map<std::string, std::size_t> buffer_index;
  for (std::size_t b = 0; b < net.buffers.size(); ++b) buffer_index[net.buffers[b].id] = b;
  std::set<Address> victim_addrs;
  for (const auto& v : victims) {
    if (auto i = net.find_instance(v)) victim_addrs.insert(net.instances[*i].address);
  }

  std::map<Address, uint256> into_victims;  // party -> value it sent to victims
  std::map<Address, uint256> from_victims;  // party -> value victims sent it
  for (const auto& r : trace) {
    if (!victims.count(r.actor)) continue;
    for (const auto& [buf, tok] : r.consumed) {
      if (const auto* m = std::get_if<MsgToken>(&tok)) into_victims[m->sender] += m->value;
    }
    for (const auto& [buf, tok] : r.produced) {
      const auto* m = std::get_if<MsgToken>(&tok);
      if (!m) continue;
      Address dest;  // tokens left on an open buffer count against the zero address
      auto it = buffer_index.find(buf);
      if (it != buffer_index.end() && net.buffers[it->second].target) {
        dest = net.instances[*net.buffers[it->second].target].address;
      }
      from_victims[dest] += m->value;
    }
  }
  uint256 loss = 0;
  for (const auto& [party, out] : from_victims) {
    if (victim_addrs.count(party)) continue;
    uint256 in = into_victims.count(party) ? into_victims.at(party) : uint256(0);
    if (out > in) loss += out - in;
  }
  return loss;
}

}  // namespace actorforge::dataflow
