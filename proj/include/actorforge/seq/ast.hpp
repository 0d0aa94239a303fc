// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/address.hpp"
#include "actorforge/box.hpp"
#include "actorforge/diagnostics.hpp"
#include "actorforge/numeric.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace actorforge::seq {

enum class TypeKind { Uint, Bool, Address, Mapping, Contract };

/// `Contract` is a named contract or interface handle; at runtime it is an
/// address. `Mapping` is always mapping(address => uint).
struct TypeName {
  TypeKind kind = TypeKind::Uint;
  std::string contract;

  bool operator==(const TypeName&) const = default;
};

std::string to_string(const TypeName& t);

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
std::string_view to_string(BinaryOp op);

/// What a bare identifier refers to. Filled in by resolve_unit().
enum class NameKind { Unresolved, State, Local };

struct Expr;

struct IntLit {
  uint256 value;
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
  NameKind kind = NameKind::Unresolved;
  bool operator==(const NameRef&) const = default;
};
/// `map[key]`; the map is always a state variable.
struct Index {
  std::string map;
  box<Expr> key;
  bool operator==(const Index&) const = default;
};
/// `expr.balance`
struct Balance {
  box<Expr> account;
  bool operator==(const Balance&) const = default;
};
struct MsgSender {
  bool operator==(const MsgSender&) const = default;
};
struct MsgValue {
  bool operator==(const MsgValue&) const = default;
};
struct This {
  bool operator==(const This&) const = default;
};
/// `address(e)` or `SomeContract(e)`: reinterprets an address.
struct Cast {
  TypeName type;
  box<Expr> operand;
  bool operator==(const Cast&) const = default;
};
struct Not {
  box<Expr> operand;
  bool operator==(const Not&) const = default;
};
struct Binary {
  BinaryOp op = BinaryOp::Add;
  box<Expr> lhs;
  box<Expr> rhs;
  bool operator==(const Binary&) const = default;
};
/// `target.fn{value: v}(args)`, or `fn(args)` on the current contract when
/// `target` is empty.
struct Call {
  std::optional<box<Expr>> target;
  std::string function;
  std::optional<box<Expr>> value;
  std::vector<Expr> args;
  bool operator==(const Call&) const = default;
};

struct Expr {
  std::variant<IntLit, BoolLit, AddrLit, NameRef, Index, Balance, MsgSender, MsgValue, This, Cast, Not, Binary, Call>
      node;
  SourceSpan span;
  bool operator==(const Expr&) const = default;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Require {
  Expr condition;
  std::optional<std::string> message;
  bool operator==(const Require&) const = default;
};
/// `target = value;` or `target[key] = value;` on a state variable or local.
struct Assign {
  std::string target;
  std::optional<Expr> key;
  Expr value;
  NameKind kind = NameKind::Unresolved;
  bool operator==(const Assign&) const = default;
};
struct LocalDecl {
  TypeName type;
  std::string name;
  std::optional<Expr> init;
  bool operator==(const LocalDecl&) const = default;
};
struct If {
  Expr condition;
  box<Block> then_branch;
  box<Block> else_branch;
  bool operator==(const If&) const = default;
};
/// `send(to, amount);` moves value and runs the recipient's fallback.
struct Send {
  Expr to;
  Expr amount;
  bool operator==(const Send&) const = default;
};
/// A call used as a statement.
struct CallStmt {
  Expr call;
  bool operator==(const CallStmt&) const = default;
};
struct Return {
  std::optional<Expr> value;
  bool operator==(const Return&) const = default;
};

struct Stmt {
  std::variant<Require, Assign, LocalDecl, If, Send, CallStmt, Return> node;
  SourceSpan span;
  bool operator==(const Stmt&) const = default;
};

enum class Visibility { Public, External, Internal, Private };
enum class FunctionKind { Function, Constructor, Fallback };

struct Param {
  TypeName type;
  std::string name;
  bool operator==(const Param&) const = default;
};

struct FunctionDef {
  FunctionKind kind = FunctionKind::Function;
  std::string name;  // "constructor" / "fallback" for the special kinds
  std::vector<Param> params;
  Visibility visibility = Visibility::Public;
  bool payable = false;
  bool view = false;  // view or pure
  std::optional<TypeName> returns;
  Block body;
  bool has_body = true;  // false for interface declarations
  SourceSpan span;

  bool externally_callable() const noexcept {
    return visibility == Visibility::Public || visibility == Visibility::External;
  }
  bool operator==(const FunctionDef&) const = default;
};

struct StateVar {
  TypeName type;
  std::string name;
  std::optional<Expr> init;
  SourceSpan span;
  bool operator==(const StateVar&) const = default;
};

struct ContractDef {
  std::string name;
  bool is_interface = false;
  std::vector<StateVar> state_vars;
  std::vector<FunctionDef> functions;  // declaration order, excluding constructor and fallback
  std::optional<FunctionDef> constructor;
  std::optional<FunctionDef> fallback;
  SourceSpan span;

  const FunctionDef* find_function(std::string_view name) const;
  const StateVar* find_state(std::string_view name) const;
  bool operator==(const ContractDef&) const = default;
};

struct SourceUnit {
  std::vector<ContractDef> contracts;  // interfaces included

  const ContractDef* find(std::string_view name) const;
};

/// Pre-order walk over an expression tree.
template <class F>
void visit_exprs(const Expr& e, F&& f) {
  f(e);
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Index>) {
          visit_exprs(*n.key, f);
        } else if constexpr (std::is_same_v<N, Balance>) {
          visit_exprs(*n.account, f);
        } else if constexpr (std::is_same_v<N, Cast> || std::is_same_v<N, Not>) {
          visit_exprs(*n.operand, f);
        } else if constexpr (std::is_same_v<N, Binary>) {
          visit_exprs(*n.lhs, f);
          visit_exprs(*n.rhs, f);
        } else if constexpr (std::is_same_v<N, Call>) {
          if (n.target) visit_exprs(**n.target, f);
          if (n.value) visit_exprs(**n.value, f);
          for (const auto& a : n.args) visit_exprs(a, f);
        }
      },
      e.node);
}

}  // namespace actorforge::seq
