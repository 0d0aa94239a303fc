// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/address.hpp"
#include "actorforge/box.hpp"
#include "actorforge/diagnostics.hpp"
#include "actorforge/numeric.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace actorforge::dsl {

/// Closed type set. `Map` is map(address -> uint); `Msg` is only a port token
/// type: a record {sender: address, value: uint}.
enum class Type { Uint, Address, Bool, Map, Msg };

std::string_view to_string(Type t);

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Not };

std::string_view to_string(BinaryOp op);

/// What an identifier resolved to. Filled in by resolve().
enum class Binding { Unresolved, State, Pattern, Local };

struct Expr;

struct IntLit {
  uint256 value;
  bool ether = false;  // written with the `ether` suffix; only affects rendering
  bool operator==(const IntLit&) const = default;
};
struct BoolLit {
  bool value = false;
  bool operator==(const BoolLit&) const = default;
};
struct AddrLit {
  Address value;
  bool operator==(const AddrLit&) const = default;
};
struct NameRef {
  std::string name;
  Binding binding = Binding::Unresolved;
  bool operator==(const NameRef&) const = default;
};
struct Index {
  std::string map;
  box<Expr> key;
  Binding binding = Binding::Unresolved;
  bool operator==(const Index&) const = default;
};
struct Unary {
  UnaryOp op = UnaryOp::Not;
  box<Expr> operand;
  bool operator==(const Unary&) const = default;
};
struct Binary {
  BinaryOp op = BinaryOp::Add;
  box<Expr> lhs;
  box<Expr> rhs;
  bool operator==(const Binary&) const = default;
};

struct Expr {
  std::variant<IntLit, BoolLit, AddrLit, NameRef, Index, Unary, Binary> node;
  SourceSpan span;
  std::optional<Type> type;  // set by resolve()

  bool operator==(const Expr&) const = default;
};

/// `do target := value` or `do target[key] := value`
struct Assign {
  std::string target;
  std::optional<Expr> key;
  Expr value;
  SourceSpan span;
  bool operator==(const Assign&) const = default;
};

/// `let name := value`
struct Let {
  std::string name;
  Expr value;
  SourceSpan span;
  std::optional<Type> type;
  bool operator==(const Let&) const = default;
};

/// `emit port(v1, v2, ...)`: one token per value.
struct Emit {
  std::string port;
  std::vector<Expr> values;
  SourceSpan span;
  bool operator==(const Emit&) const = default;
};

using Stmt = std::variant<Assign, Let, Emit>;

const SourceSpan& span_of(const Stmt& s);

enum class Direction { Input, Output };

struct PortDecl {
  std::string name;
  Direction direction = Direction::Input;
  Type token_type = Type::Uint;
  SourceSpan span;
  bool operator==(const PortDecl&) const = default;
};

struct StateVarDecl {
  std::string name;
  Type var_type = Type::Uint;
  std::optional<Expr> initializer;
  SourceSpan span;
  bool operator==(const StateVarDecl&) const = default;
};

/// One `consume` clause. `counts` has one entry for a constant rate and
/// several for a cyclic rate; `patterns`, when present, name each token.
struct Consume {
  std::string port;
  std::vector<std::string> patterns;
  std::vector<std::uint64_t> counts{1};
  SourceSpan span;

  bool cyclic() const noexcept { return counts.size() > 1; }
  bool operator==(const Consume&) const = default;
};

struct ActionDecl {
  std::string name;
  std::vector<Consume> consumes;
  std::vector<Expr> guards;
  std::vector<Stmt> body;
  SourceSpan span;

  bool operator==(const ActionDecl&) const = default;
};

struct Transition {
  std::string from;
  std::string action;
  std::string to;
  SourceSpan span;
  bool operator==(const Transition&) const = default;
};

struct FsmDecl {
  std::string initial;
  std::vector<Transition> transitions;
  SourceSpan span;
  bool operator==(const FsmDecl&) const = default;
};

struct ActorDecl {
  std::string name;
  std::vector<PortDecl> inputs;
  std::vector<PortDecl> outputs;
  std::vector<StateVarDecl> state_vars;
  std::vector<ActionDecl> actions;
  std::optional<FsmDecl> schedule;
  SourceSpan span;

  const PortDecl* find_port(std::string_view name) const;
  const StateVarDecl* find_state(std::string_view name) const;
  const ActionDecl* find_action(std::string_view name) const;

  bool operator==(const ActorDecl&) const = default;
};

/// Copies `decl` with every span and resolver annotation reset, so two ASTs
/// compare equal iff they have the same structure.
ActorDecl strip(ActorDecl decl);
Expr strip(Expr e);

inline bool structurally_equal(const ActorDecl& a, const ActorDecl& b) {
  return strip(a) == strip(b);
}

/// Pre-order walk over an expression tree.
template <class F>
void visit_exprs(const Expr& e, F&& f) {
  f(e);
  if (auto* i = std::get_if<Index>(&e.node)) {
    visit_exprs(*i->key, f);
  } else if (auto* u = std::get_if<Unary>(&e.node)) {
    visit_exprs(*u->operand, f);
  } else if (auto* b = std::get_if<Binary>(&e.node)) {
    visit_exprs(*b->lhs, f);
    visit_exprs(*b->rhs, f);
  }
}

}  // namespace actorforge::dsl
