// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dsl/frontend.hpp"

#include <sstream>

namespace actorforge::dsl {

namespace {

int precedence(const Expr& e) {
  if (auto* b = std::get_if<Binary>(&e.node)) {
    switch (b->op) {
      case BinaryOp::Or: return 1;
      case BinaryOp::And: return 2;
      case BinaryOp::Eq:
      case BinaryOp::Ne:
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge: return 4;
      case BinaryOp::Add:
      case BinaryOp::Sub: return 5;
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod: return 6;
    }
  }
  if (std::holds_alternative<Unary>(e.node)) return 3;
  return 7;
}

void print(std::ostream& os, const Expr& e, int min_prec) {
  const int p = precedence(e);
  const bool parens = p < min_prec;
  if (parens) os << '(';
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntLit>) {
          if (n.ether) {
            os << format_ether(n.value);
          } else {
            os << to_decimal(n.value);
          }
        } else if constexpr (std::is_same_v<N, BoolLit>) {
          os << (n.value ? "true" : "false");
        } else if constexpr (std::is_same_v<N, AddrLit>) {
          os << n.value.hex();
        } else if constexpr (std::is_same_v<N, NameRef>) {
          os << n.name;
        } else if constexpr (std::is_same_v<N, Index>) {
          os << n.map << '[';
          print(os, *n.key, 0);
          os << ']';
        } else if constexpr (std::is_same_v<N, Unary>) {
          os << "not ";
          print(os, *n.operand, 3);
        } else {
          const bool comparison = p == 4;
          print(os, *n.lhs, comparison ? p + 1 : p);
          os << ' ' << to_string(n.op) << ' ';
          print(os, *n.rhs, p + 1);
        }
      },
      e.node);
  if (parens) os << ')';
}

}  // namespace

std::string unparse(const Expr& e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

std::string unparse(const ActorDecl& d) {
  std::ostringstream os;
  os << "actor " << d.name << '\n';
  for (const auto* ports : {&d.inputs, &d.outputs}) {
    for (const auto& p : *ports) {
      os << "  " << (p.direction == Direction::Input ? "in " : "out ") << p.name << " : "
         << to_string(p.token_type) << '\n';
    }
  }
  for (const auto& s : d.state_vars) {
    os << "  state " << s.name << " : " << to_string(s.var_type);
    if (s.initializer) os << " = " << unparse(*s.initializer);
    os << '\n';
  }
  for (const auto& a : d.actions) {
    os << "\n  action " << a.name << '\n';
    for (const auto& c : a.consumes) {
      os << "    consume " << c.port;
      if (!c.patterns.empty()) {
        os << " [";
        for (std::size_t i = 0; i < c.patterns.size(); ++i) os << (i ? ", " : "") << c.patterns[i];
        os << ']';
      } else if (c.cyclic()) {
        os << " * (";
        for (std::size_t i = 0; i < c.counts.size(); ++i) os << (i ? ", " : "") << c.counts[i];
        os << ')';
      } else if (c.counts.front() != 1) {
        os << " * " << c.counts.front();
      }
      os << '\n';
    }
    for (const auto& g : a.guards) os << "    guard " << unparse(g) << '\n';
    for (const auto& st : a.body) {
      std::visit(
          [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Assign>) {
              os << "    do " << s.target;
              if (s.key) os << '[' << unparse(*s.key) << ']';
              os << " := " << unparse(s.value) << '\n';
            } else if constexpr (std::is_same_v<S, Let>) {
              os << "    let " << s.name << " := " << unparse(s.value) << '\n';
            } else {
              os << "    emit " << s.port << '(';
              for (std::size_t i = 0; i < s.values.size(); ++i) os << (i ? ", " : "") << unparse(s.values[i]);
              os << ")\n";
            }
          },
          st);
    }
    os << "  end\n";
  }
  if (d.schedule) {
    os << "\n  schedule " << d.schedule->initial << '\n';
    for (const auto& t : d.schedule->transitions) {
      os << "    " << t.from << " (" << t.action << ") -> " << t.to << '\n';
    }
    os << "  end\n";
  }
  os << "end\n";
  return os.str();
}

}  // namespace actorforge::dsl
