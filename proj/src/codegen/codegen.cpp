// SPDX-License-Identifier: Apache-2.0
#include "actorforge/codegen/codegen.hpp"

#include "actorforge/dsl/frontend.hpp"
#include "actorforge/seq/print.hpp"
#include "actorforge/version.hpp"

#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace actorforge::codegen {

namespace {

using Hook = std::function<std::optional<seq::Expr>(const dsl::Expr&)>;

seq::TypeName to_seq_type(dsl::Type t) {
  switch (t) {
    case dsl::Type::Uint: return {seq::TypeKind::Uint, ""};
    case dsl::Type::Address: return {seq::TypeKind::Address, ""};
    case dsl::Type::Bool: return {seq::TypeKind::Bool, ""};
    case dsl::Type::Map: return {seq::TypeKind::Mapping, ""};
    case dsl::Type::Msg: break;
  }
  return {seq::TypeKind::Uint, ""};
}

seq::BinaryOp to_seq_op(dsl::BinaryOp op) {
  switch (op) {
    case dsl::BinaryOp::Add: return seq::BinaryOp::Add;
    case dsl::BinaryOp::Sub: return seq::BinaryOp::Sub;
    case dsl::BinaryOp::Mul: return seq::BinaryOp::Mul;
    case dsl::BinaryOp::Div: return seq::BinaryOp::Div;
    case dsl::BinaryOp::Mod: return seq::BinaryOp::Mod;
    case dsl::BinaryOp::Eq: return seq::BinaryOp::Eq;
    case dsl::BinaryOp::Ne: return seq::BinaryOp::Ne;
    case dsl::BinaryOp::Lt: return seq::BinaryOp::Lt;
    case dsl::BinaryOp::Le: return seq::BinaryOp::Le;
    case dsl::BinaryOp::Gt: return seq::BinaryOp::Gt;
    case dsl::BinaryOp::Ge: return seq::BinaryOp::Ge;
    case dsl::BinaryOp::And: return seq::BinaryOp::And;
    case dsl::BinaryOp::Or: return seq::BinaryOp::Or;
  }
  return seq::BinaryOp::Add;
}

bool is_pattern_of(const dsl::ActionDecl& action, const std::string& name) {
  for (const auto& c : action.consumes) {
    for (const auto& p : c.patterns) {
      if (p == name) return true;
    }
  }
  return false;
}

seq::Expr translate(const dsl::ActionDecl* action, const dsl::Expr& e, const Hook& hook) {
  if (hook) {
    if (auto replaced = hook(e)) return std::move(*replaced);
  }
  return std::visit(
      [&](const auto& n) -> seq::Expr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, dsl::IntLit>) {
          return {seq::IntLit{n.value}, {}};
        } else if constexpr (std::is_same_v<N, dsl::BoolLit>) {
          return {seq::BoolLit{n.value}, {}};
        } else if constexpr (std::is_same_v<N, dsl::AddrLit>) {
          return {seq::AddrLit{n.value}, {}};
        } else if constexpr (std::is_same_v<N, dsl::NameRef>) {
          if (n.binding == dsl::Binding::State) return {seq::NameRef{n.name, seq::NameKind::State}, {}};
          if (n.binding == dsl::Binding::Pattern && !(action && is_pattern_of(*action, n.name))) {
            if (n.name == dsl::kSenderVar) return {seq::MsgSender{}, {}};
            if (n.name == dsl::kValueVar) return {seq::MsgValue{}, {}};
          }
          return {seq::NameRef{n.name, seq::NameKind::Local}, {}};
        } else if constexpr (std::is_same_v<N, dsl::Index>) {
          return {seq::Index{n.map, translate(action, *n.key, hook)}, {}};
        } else if constexpr (std::is_same_v<N, dsl::Unary>) {
          return {seq::Not{translate(action, *n.operand, hook)}, {}};
        } else {
          return {seq::Binary{to_seq_op(n.op), translate(action, *n.lhs, hook), translate(action, *n.rhs, hook)}, {}};
        }
      },
      e.node);
}

// State variables an expression reads, directly or through an index.
std::set<std::string> state_reads(const dsl::Expr& e) {
  std::set<std::string> out;
  dsl::visit_exprs(e, [&](const dsl::Expr& x) {
    if (const auto* n = std::get_if<dsl::NameRef>(&x.node)) {
      if (n->binding == dsl::Binding::State) out.insert(n->name);
    } else if (const auto* i = std::get_if<dsl::Index>(&x.node)) {
      out.insert(i->map);
    }
  });
  return out;
}

bool reads_local(const dsl::Expr& e) {
  bool found = false;
  dsl::visit_exprs(e, [&](const dsl::Expr& x) {
    if (const auto* n = std::get_if<dsl::NameRef>(&x.node)) found |= n->binding == dsl::Binding::Local;
  });
  return found;
}

seq::Expr name(std::string_view n, seq::NameKind kind) { return {seq::NameRef{std::string(n), kind}, {}}; }

seq::Stmt stmt(decltype(seq::Stmt::node) node) { return seq::Stmt{std::move(node), {}}; }

}  // namespace

seq::Expr translate_expr(const dsl::ActionDecl& action, const dsl::Expr& e) { return translate(&action, e, nullptr); }

EmitPlan plan_action(const dsl::ActorDecl& decl, const dsl::ActionDecl& action) {
  EmitPlan plan;
  plan.action = action.name;

  for (const auto& c : action.consumes) {
    const dsl::PortDecl* port = decl.find_port(c.port);
    if (!port) throw PlanError(c.span, "unknown port '" + c.port + "'");
    if (c.cyclic()) throw PlanError(c.span, "cyclic consumption on '" + c.port + "' has no single-call equivalent");
    if (port->token_type == dsl::Type::Msg) {
      if (plan.payable || c.counts.front() != 1) {
        throw PlanError(c.span, "a generated function receives at most one msg token");
      }
      plan.payable = true;
      continue;
    }
    if (!c.patterns.empty()) {
      for (const auto& p : c.patterns) plan.params.push_back({to_seq_type(port->token_type), p});
    } else {
      for (std::uint64_t i = 0; i < c.counts.front(); ++i) {
        plan.params.push_back({to_seq_type(port->token_type), "__" + c.port + "_" + std::to_string(i)});
      }
    }
  }

  for (const auto& g : action.guards) plan.guards.push_back(translate(&action, g, nullptr));

  // body position of every state write, per variable
  std::map<std::string, std::vector<std::size_t>> writes;
  for (std::size_t i = 0; i < action.body.size(); ++i) {
    if (const auto* a = std::get_if<dsl::Assign>(&action.body[i])) writes[a->target].push_back(i);
  }

  std::map<std::string, std::size_t> capture_index;  // printed capture value -> captures[]
  const Hook capture = [&](const dsl::Expr& x) -> std::optional<seq::Expr> {
    std::string var;
    if (const auto* n = std::get_if<dsl::NameRef>(&x.node)) {
      if (n->binding != dsl::Binding::State) return std::nullopt;
      var = n->name;
    } else if (const auto* i = std::get_if<dsl::Index>(&x.node)) {
      var = i->map;
    } else {
      return std::nullopt;
    }
    if (!writes.count(var)) return std::nullopt;
    if (reads_local(x)) throw PlanError(x.span, "pre-state read of '" + var + "' depends on a local binding");
    seq::Expr value = translate(&action, x, nullptr);
    const std::string key = seq::print_expr(value);
    auto it = capture_index.find(key);
    if (it == capture_index.end()) {
      it = capture_index.emplace(key, plan.captures.size()).first;
      plan.captures.push_back(Capture{to_seq_type(x.type.value_or(dsl::Type::Uint)),
                                      std::string(kCapturePrefix) + std::to_string(plan.captures.size()),
                                      std::move(value)});
    }
    return name(plan.captures[it->second].name, seq::NameKind::Local);
  };

  for (std::size_t i = 0; i < action.body.size(); ++i) {
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, dsl::Assign>) {
            std::optional<seq::Expr> key;
            if (s.key) key = translate(&action, *s.key, nullptr);
            plan.updates.push_back(
                stmt(seq::Assign{s.target, std::move(key), translate(&action, s.value, nullptr), seq::NameKind::State}));
          } else if constexpr (std::is_same_v<S, dsl::Let>) {
            plan.updates.push_back(stmt(seq::LocalDecl{to_seq_type(s.type.value_or(dsl::Type::Uint)), s.name,
                                                       translate(&action, s.value, nullptr)}));
          } else {
            const dsl::PortDecl* port = decl.find_port(s.port);
            if (!port || port->token_type != dsl::Type::Msg) {
              throw PlanError(s.span, "emission on '" + s.port + "' is not a msg transfer");
            }
            if (!plan.payable) throw PlanError(s.span, "emission has no recipient: the action consumes no msg token");
            for (const auto& v : s.values) {
              for (const auto& var : state_reads(v)) {
                auto w = writes.find(var);
                if (w == writes.end()) continue;
                const bool before = w->second.front() < i;
                const bool after = w->second.back() > i;
                if (before && after) {
                  throw PlanError(s.span, "emission reads '" + var + "', which is written both before and after it");
                }
              }
              plan.sends.push_back({s.port, translate(&action, v, capture)});
            }
          }
        },
        action.body[i]);
  }
  return plan;
}

std::string describe(const EmitPlan& plan) {
  std::ostringstream os;
  os << "action " << plan.action << (plan.payable ? " payable" : "") << "\n";
  for (const auto& p : plan.params) os << "  param " << seq::to_string(p.type) << " " << p.name << "\n";
  for (const auto& r : plan.guards) os << "  require " << seq::print_expr(r) << "\n";
  for (const auto& c : plan.captures) os << "  capture " << c.name << " = " << seq::print_expr(c.value) << "\n";
  for (const auto& u : plan.updates) {
    if (const auto* a = std::get_if<seq::Assign>(&u.node)) {
      os << "  update " << a->target;
      if (a->key) os << "[" << seq::print_expr(*a->key) << "]";
      os << " = " << seq::print_expr(a->value) << "\n";
    } else if (const auto* d = std::get_if<seq::LocalDecl>(&u.node)) {
      os << "  let " << d->name << " = " << seq::print_expr(*d->init) << "\n";
    }
  }
  for (const auto& s : plan.sends) os << "  send " << s.port << " " << seq::print_expr(s.amount) << "\n";
  os << "  lock " << plan.lock << "\n";
  return os.str();
}

seq::ContractDef build_contract(const dsl::ActorDecl& decl) {
  if (decl.schedule) {
    throw PlanError(decl.schedule->span, "action schedules have no contract equivalent");
  }
  seq::ContractDef c;
  c.name = decl.name;
  for (const auto& v : decl.state_vars) {
    if (v.name == kLockVar) throw PlanError(v.span, "'" + v.name + "' is reserved for the generated lock");
    seq::StateVar sv{to_seq_type(v.var_type), v.name, std::nullopt, {}};
    if (v.initializer) sv.init = translate(nullptr, *v.initializer, nullptr);
    c.state_vars.push_back(std::move(sv));
  }
  c.state_vars.push_back({{seq::TypeKind::Bool, ""}, std::string(kLockVar), std::nullopt, {}});

  for (const auto& action : decl.actions) {
    EmitPlan plan = plan_action(decl, action);
    seq::FunctionDef f;
    f.name = plan.action;
    f.params = plan.params;
    f.payable = plan.payable;
    f.body.push_back(stmt(seq::Require{{seq::Not{name(plan.lock, seq::NameKind::State)}, {}}, "re-entrant call"}));
    f.body.push_back(stmt(seq::Assign{plan.lock, std::nullopt, {seq::BoolLit{true}, {}}, seq::NameKind::State}));
    for (auto& r : plan.guards) f.body.push_back(stmt(seq::Require{std::move(r), std::nullopt}));
    for (auto& cap : plan.captures) f.body.push_back(stmt(seq::LocalDecl{cap.type, cap.name, std::move(cap.value)}));
    for (auto& u : plan.updates) f.body.push_back(std::move(u));
    for (auto& s : plan.sends) f.body.push_back(stmt(seq::Send{{seq::MsgSender{}, {}}, std::move(s.amount)}));
    f.body.push_back(stmt(seq::Assign{plan.lock, std::nullopt, {seq::BoolLit{false}, {}}, seq::NameKind::State}));
    c.functions.push_back(std::move(f));
  }
  return c;
}

std::string generate_contract(const dsl::ActorDecl& decl) {
  std::string out = "// generated by " + std::string(kToolName) + " " + std::string(kVersion) + " -- do not edit\n";
  out += "pragma solidity ^0.8.0;\n\n";
  out += seq::print_contract(build_contract(decl));
  return out;
}

std::string output_file_name(const std::filesystem::path& actor_path) {
  return actor_path.stem().string() + "_generated.sol.txt";
}

}  // namespace actorforge::codegen
