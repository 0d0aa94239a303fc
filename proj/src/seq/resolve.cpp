// SPDX-License-Identifier: Apache-2.0
#include "actorforge/seq/frontend.hpp"

#include <set>

namespace actorforge::seq {

std::string to_string(const TypeName& t) {
  switch (t.kind) {
    case TypeKind::Uint:
      return "uint";
    case TypeKind::Bool:
      return "bool";
    case TypeKind::Address:
      return "address";
    case TypeKind::Mapping:
      return "mapping(address => uint)";
    case TypeKind::Contract:
      return t.contract;
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
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

const FunctionDef* ContractDef::find_function(std::string_view n) const {
  for (const auto& f : functions) {
    if (f.name == n) return &f;
  }
  return nullptr;
}

const StateVar* ContractDef::find_state(std::string_view n) const {
  for (const auto& v : state_vars) {
    if (v.name == n) return &v;
  }
  return nullptr;
}

const ContractDef* SourceUnit::find(std::string_view n) const {
  for (const auto& c : contracts) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

namespace {

class UnitResolver {
 public:
  explicit UnitResolver(SourceUnit& unit) : unit_(unit) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> names;
    for (auto& c : unit_.contracts) {
      if (!names.insert(c.name).second) error("NameError", c.span, "contract '" + c.name + "' declared twice");
    }
    for (auto& c : unit_.contracts) resolve_contract(c);
    return std::move(diags_);
  }

 private:
  void error(std::string code, const SourceSpan& span, std::string message) {
    diags_.push_back(Diagnostic{span, Severity::Error, std::move(code), std::move(message)});
  }

  void check_type(const TypeName& t, const SourceSpan& span) {
    if (t.kind == TypeKind::Contract && !unit_.find(t.contract)) {
      error("NameError", span, "unknown type '" + t.contract + "'");
    }
  }

  void resolve_contract(ContractDef& c) {
    contract_ = &c;
    std::set<std::string> vars;
    for (auto& v : c.state_vars) {
      if (!vars.insert(v.name).second) error("NameError", v.span, "state variable '" + v.name + "' declared twice");
      check_type(v.type, v.span);
      if (v.init) {
        scope_.clear();
        in_initializer_ = true;
        resolve_expr(*v.init);
        in_initializer_ = false;
      }
    }
    std::set<std::string> fns;
    for (auto& f : c.functions) {
      if (!fns.insert(f.name).second) error("NameError", f.span, "function '" + f.name + "' declared twice");
      resolve_function(f);
    }
    if (c.constructor) resolve_function(*c.constructor);
    if (c.fallback) {
      if (!c.fallback->params.empty()) error("TypeError", c.fallback->span, "fallback takes no parameters");
      resolve_function(*c.fallback);
    }
  }

  void resolve_function(FunctionDef& f) {
    if (contract_->is_interface && f.has_body) {
      error("TypeError", f.span, "interface function '" + f.name + "' must not have a body");
    }
    if (!contract_->is_interface && !f.has_body) {
      error("TypeError", f.span, "function '" + f.name + "' has no body");
    }
    scope_.clear();
    for (const auto& p : f.params) {
      check_type(p.type, f.span);
      if (p.type.kind == TypeKind::Mapping) error("TypeError", f.span, "mapping parameters are not supported");
      if (!scope_.insert(p.name).second) error("NameError", f.span, "parameter '" + p.name + "' declared twice");
    }
    resolve_block(f.body);
  }

  void resolve_block(Block& b) {
    for (auto& s : b) resolve_stmt(s);
  }

  void resolve_stmt(Stmt& s) {
    std::visit(
        [&](auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Require>) {
            resolve_expr(n.condition);
          } else if constexpr (std::is_same_v<N, Assign>) {
            resolve_expr(n.value);
            if (n.key) resolve_expr(*n.key);
            if (scope_.count(n.target)) {
              n.kind = NameKind::Local;
              if (n.key) error("TypeError", s.span, "local '" + n.target + "' is not a mapping");
            } else if (const StateVar* v = contract_->find_state(n.target)) {
              n.kind = NameKind::State;
              if (n.key && v->type.kind != TypeKind::Mapping) {
                error("TypeError", s.span, "'" + n.target + "' is not a mapping");
              } else if (!n.key && v->type.kind == TypeKind::Mapping) {
                error("TypeError", s.span, "mapping '" + n.target + "' must be assigned element-wise");
              }
            } else {
              error("NameError", s.span, "unknown variable '" + n.target + "'");
            }
          } else if constexpr (std::is_same_v<N, LocalDecl>) {
            check_type(n.type, s.span);
            if (n.type.kind == TypeKind::Mapping) error("TypeError", s.span, "local mappings are not supported");
            if (n.init) resolve_expr(*n.init);
            if (!scope_.insert(n.name).second) error("NameError", s.span, "local '" + n.name + "' declared twice");
          } else if constexpr (std::is_same_v<N, If>) {
            resolve_expr(n.condition);
            auto saved = scope_;
            resolve_block(*n.then_branch);
            scope_ = saved;
            resolve_block(*n.else_branch);
            scope_ = saved;
          } else if constexpr (std::is_same_v<N, Send>) {
            resolve_expr(n.to);
            resolve_expr(n.amount);
          } else if constexpr (std::is_same_v<N, CallStmt>) {
            resolve_expr(n.call);
          } else {
            if (n.value) resolve_expr(*n.value);
          }
        },
        s.node);
  }

  void resolve_expr(Expr& e) {
    std::visit(
        [&](auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, NameRef>) {
            if (!in_initializer_ && scope_.count(n.name)) {
              n.kind = NameKind::Local;
            } else if (!in_initializer_ && contract_->find_state(n.name)) {
              n.kind = NameKind::State;
            } else {
              error("NameError", e.span, "unbound identifier '" + n.name + "'");
            }
          } else if constexpr (std::is_same_v<N, Index>) {
            const StateVar* v = contract_->find_state(n.map);
            if (!v) {
              error("NameError", e.span, "unknown mapping '" + n.map + "'");
            } else if (v->type.kind != TypeKind::Mapping) {
              error("TypeError", e.span, "'" + n.map + "' is not a mapping");
            }
            resolve_expr(*n.key);
          } else if constexpr (std::is_same_v<N, Balance>) {
            resolve_expr(*n.account);
          } else if constexpr (std::is_same_v<N, Cast> || std::is_same_v<N, Not>) {
            resolve_expr(*n.operand);
          } else if constexpr (std::is_same_v<N, Binary>) {
            resolve_expr(*n.lhs);
            resolve_expr(*n.rhs);
          } else if constexpr (std::is_same_v<N, Call>) {
            if (n.value) resolve_expr(**n.value);
            for (auto& a : n.args) resolve_expr(a);
            if (n.target) {
              resolve_expr(**n.target);
              return;
            }
            if (unit_.find(n.function)) {
              if (n.value || n.args.size() != 1) {
                error("TypeError", e.span, "conversion to '" + n.function + "' takes exactly one argument");
                return;
              }
              Expr operand = std::move(n.args.front());
              e.node = Cast{{TypeKind::Contract, n.function}, std::move(operand)};
              return;
            }
            const FunctionDef* f = contract_->find_function(n.function);
            if (!f) {
              error("NameError", e.span, "unknown function '" + n.function + "'");
            } else if (f->params.size() != n.args.size()) {
              error("TypeError", e.span, "'" + n.function + "' expects " + std::to_string(f->params.size()) +
                                             " argument(s), got " + std::to_string(n.args.size()));
            } else if (n.value) {
              error("TypeError", e.span, "internal call to '" + n.function + "' cannot carry value");
            }
          }
        },
        e.node);
  }

  SourceUnit& unit_;
  ContractDef* contract_ = nullptr;
  std::set<std::string> scope_;
  bool in_initializer_ = false;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> resolve_unit(SourceUnit& unit) { return UnitResolver(unit).run(); }

}  // namespace actorforge::seq
