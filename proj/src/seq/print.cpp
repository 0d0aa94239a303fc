// SPDX-License-Identifier: Apache-2.0
#include "actorforge/seq/print.hpp"

#include <sstream>

namespace actorforge::seq {

namespace {

enum Prec { kOr = 1, kAnd, kCmp, kAdd, kMul, kUnary, kPostfix };

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return kMul;
    default: return kCmp;
  }
}

std::string print_at(const Expr& e, int min_prec);

std::string print_args(const std::vector<Expr>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + print_at(args[i], kOr);
  return out + ")";
}

std::string print_at(const Expr& e, int min_prec) {
  int prec = kPostfix;
  std::string text = std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntLit>) {
          if (n.value != 0 && n.value % wei_per_ether() == 0) return to_decimal(n.value / wei_per_ether()) + " ether";
          return to_decimal(n.value);
        } else if constexpr (std::is_same_v<N, BoolLit>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<N, AddrLit>) {
          return n.value.hex();
        } else if constexpr (std::is_same_v<N, NameRef>) {
          return n.name;
        } else if constexpr (std::is_same_v<N, Index>) {
          return n.map + "[" + print_at(*n.key, kOr) + "]";
        } else if constexpr (std::is_same_v<N, Balance>) {
          return print_at(*n.account, kPostfix) + ".balance";
        } else if constexpr (std::is_same_v<N, MsgSender>) {
          return "msg.sender";
        } else if constexpr (std::is_same_v<N, MsgValue>) {
          return "msg.value";
        } else if constexpr (std::is_same_v<N, This>) {
          return "this";
        } else if constexpr (std::is_same_v<N, Cast>) {
          return (n.type.kind == TypeKind::Contract ? n.type.contract : "address") + "(" + print_at(*n.operand, kOr) +
                 ")";
        } else if constexpr (std::is_same_v<N, Not>) {
          prec = kUnary;
          return "!" + print_at(*n.operand, kUnary);
        } else if constexpr (std::is_same_v<N, Binary>) {
          prec = precedence(n.op);
          // comparisons do not chain; everything else is left-associative
          const int lhs_min = prec == kCmp ? kCmp + 1 : prec;
          return print_at(*n.lhs, lhs_min) + " " + std::string(to_string(n.op)) + " " + print_at(*n.rhs, prec + 1);
        } else {
          std::string out;
          if (n.target) out = print_at(**n.target, kPostfix) + ".";
          out += n.function;
          if (n.value) out += "{value: " + print_at(**n.value, kOr) + "}";
          return out + print_args(n.args);
        }
      },
      e.node);
  return prec < min_prec ? "(" + text + ")" : text;
}

std::string visibility(Visibility v) {
  switch (v) {
    case Visibility::Public: return "public";
    case Visibility::External: return "external";
    case Visibility::Internal: return "internal";
    case Visibility::Private: return "private";
  }
  return "public";
}

class Printer {
 public:
  std::string run(const ContractDef& c) {
    os_ << (c.is_interface ? "interface " : "contract ") << c.name << " {\n";
    for (const auto& v : c.state_vars) {
      os_ << "  " << to_string(v.type) << " " << v.name;
      if (v.init) os_ << " = " << print_expr(*v.init);
      os_ << ";\n";
    }
    bool first = c.state_vars.empty();
    auto member = [&](const FunctionDef& f) {
      if (!first) os_ << "\n";
      first = false;
      function(f);
    };
    if (c.constructor) member(*c.constructor);
    for (const auto& f : c.functions) member(f);
    if (c.fallback) member(*c.fallback);
    os_ << "}\n";
    return os_.str();
  }

 private:
  void indent(int depth) { os_ << std::string(2 * depth, ' '); }

  void function(const FunctionDef& f) {
    indent(1);
    if (f.kind == FunctionKind::Constructor) {
      os_ << "constructor";
    } else if (f.kind == FunctionKind::Fallback) {
      os_ << "fallback";
    } else {
      os_ << "function " << f.name;
    }
    os_ << "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      os_ << (i ? ", " : "") << to_string(f.params[i].type) << " " << f.params[i].name;
    }
    os_ << ") " << visibility(f.visibility);
    if (f.payable) os_ << " payable";
    if (f.view) os_ << " view";
    if (f.returns) os_ << " returns (" << to_string(*f.returns) << ")";
    if (!f.has_body) {
      os_ << ";\n";
      return;
    }
    os_ << " {\n";
    block(f.body, 2);
    indent(1);
    os_ << "}\n";
  }

  void block(const Block& b, int depth) {
    for (const auto& s : b) stmt(s, depth);
  }

  void stmt(const Stmt& s, int depth) {
    indent(depth);
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Require>) {
            os_ << "require(" << print_expr(n.condition);
            if (n.message) os_ << ", \"" << *n.message << "\"";
            os_ << ");\n";
          } else if constexpr (std::is_same_v<N, Assign>) {
            os_ << n.target;
            if (n.key) os_ << "[" << print_expr(*n.key) << "]";
            os_ << " = " << print_expr(n.value) << ";\n";
          } else if constexpr (std::is_same_v<N, LocalDecl>) {
            os_ << to_string(n.type) << " " << n.name;
            if (n.init) os_ << " = " << print_expr(*n.init);
            os_ << ";\n";
          } else if constexpr (std::is_same_v<N, If>) {
            os_ << "if (" << print_expr(n.condition) << ") {\n";
            block(*n.then_branch, depth + 1);
            indent(depth);
            if (!n.else_branch->empty()) {
              os_ << "} else {\n";
              block(*n.else_branch, depth + 1);
              indent(depth);
            }
            os_ << "}\n";
          } else if constexpr (std::is_same_v<N, Send>) {
            os_ << "send(" << print_expr(n.to) << ", " << print_expr(n.amount) << ");\n";
          } else if constexpr (std::is_same_v<N, CallStmt>) {
            os_ << print_expr(n.call) << ";\n";
          } else {
            os_ << "return";
            if (n.value) os_ << " " << print_expr(*n.value);
            os_ << ";\n";
          }
        },
        s.node);
  }

  std::ostringstream os_;
};

}  // namespace

std::string print_expr(const Expr& e) { return print_at(e, kOr); }

std::string print_contract(const ContractDef& c) { return Printer().run(c); }

}  // namespace actorforge::seq
