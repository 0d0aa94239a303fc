// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dsl/ast.hpp"

#include <algorithm>

namespace actorforge::dsl {

std::string_view to_string(Type t) {
  switch (t) {
    case Type::Uint: return "uint";
    case Type::Address: return "address";
    case Type::Bool: return "bool";
    case Type::Map: return "map(address -> uint)";
    case Type::Msg: return "msg";
  }
  return "?";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

const SourceSpan& span_of(const Stmt& s) {
  return std::visit([](const auto& st) -> const SourceSpan& { return st.span; }, s);
}

namespace {

template <class T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& t) { return t.name == name; });
  return it == items.end() ? nullptr : &*it;
}

}  // namespace

const PortDecl* ActorDecl::find_port(std::string_view name) const {
  if (auto* p = find_named(inputs, name)) return p;
  return find_named(outputs, name);
}

const StateVarDecl* ActorDecl::find_state(std::string_view name) const {
  return find_named(state_vars, name);
}

const ActionDecl* ActorDecl::find_action(std::string_view name) const {
  return find_named(actions, name);
}

Expr strip(Expr e) {
  e.span = {};
  e.type.reset();
  std::visit(
      [](auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, NameRef>) {
          n.binding = Binding::Unresolved;
        } else if constexpr (std::is_same_v<N, Index>) {
          n.binding = Binding::Unresolved;
          n.key = strip(*n.key);
        } else if constexpr (std::is_same_v<N, Unary>) {
          n.operand = strip(*n.operand);
        } else if constexpr (std::is_same_v<N, Binary>) {
          n.lhs = strip(*n.lhs);
          n.rhs = strip(*n.rhs);
        }
      },
      e.node);
  return e;
}

ActorDecl strip(ActorDecl d) {
  d.span = {};
  for (auto* ports : {&d.inputs, &d.outputs}) {
    for (auto& p : *ports) p.span = {};
  }
  for (auto& s : d.state_vars) {
    s.span = {};
    if (s.initializer) s.initializer = strip(*s.initializer);
  }
  for (auto& a : d.actions) {
    a.span = {};
    for (auto& c : a.consumes) c.span = {};
    for (auto& g : a.guards) g = strip(g);
    for (auto& st : a.body) {
      std::visit(
          [](auto& s) {
            using S = std::decay_t<decltype(s)>;
            s.span = {};
            if constexpr (std::is_same_v<S, Assign>) {
              if (s.key) s.key = strip(*s.key);
              s.value = strip(s.value);
            } else if constexpr (std::is_same_v<S, Let>) {
              s.value = strip(s.value);
              s.type.reset();
            } else {
              for (auto& v : s.values) v = strip(v);
            }
          },
          st);
    }
  }
  if (d.schedule) {
    d.schedule->span = {};
    for (auto& t : d.schedule->transitions) t.span = {};
  }
  return d;
}

}  // namespace actorforge::dsl
