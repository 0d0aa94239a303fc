// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dsl/frontend.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace actorforge::dsl {

namespace {

constexpr std::array<std::string_view, 24> kKeywords = {
    "actor", "in",   "out",      "state", "action", "consume", "guard", "do",    "let",
    "emit",  "end",  "schedule", "uint",  "address", "bool",   "map",   "msg",   "true",
    "false", "and",  "or",       "not",   "ether",  "wei"};

class ActorParser {
 public:
  ActorParser(std::vector<Token> tokens, std::string file) : ts_(std::move(tokens), std::move(file)) {}

  ActorDecl run() {
    ActorDecl decl;
    decl.span = ts_.expect_keyword("actor").span;
    decl.name = ts_.expect_kind(TokenKind::Identifier, "actor name").text;
    while (!ts_.at_keyword("end")) {
      if (ts_.at_keyword("in") || ts_.at_keyword("out")) {
        auto port = parse_port();
        (port.direction == Direction::Input ? decl.inputs : decl.outputs).push_back(std::move(port));
      } else if (ts_.at_keyword("state")) {
        decl.state_vars.push_back(parse_state());
      } else if (ts_.at_keyword("action")) {
        decl.actions.push_back(parse_action());
      } else if (ts_.at_keyword("schedule")) {
        if (decl.schedule) ts_.fail(ts_.here(), "actor declares more than one schedule");
        decl.schedule = parse_schedule();
      } else {
        ts_.fail();
      }
    }
    ts_.advance();
    if (!ts_.at_end()) ts_.fail(ts_.here(), "unexpected input after 'end' of actor");
    return decl;
  }

  Expr parse_expr() { return parse_or(); }

 private:
  PortDecl parse_port() {
    PortDecl p;
    const Token& kw = ts_.advance();
    p.span = kw.span;
    p.direction = kw.text == "in" ? Direction::Input : Direction::Output;
    p.name = ts_.expect_kind(TokenKind::Identifier, "port name").text;
    ts_.expect_symbol(":");
    if (ts_.accept_keyword("uint")) {
      p.token_type = Type::Uint;
    } else if (ts_.accept_keyword("address")) {
      p.token_type = Type::Address;
    } else if (ts_.accept_keyword("bool")) {
      p.token_type = Type::Bool;
    } else if (ts_.accept_keyword("msg")) {
      p.token_type = Type::Msg;
    } else {
      ts_.fail();
    }
    return p;
  }

  Type parse_type() {
    if (ts_.accept_keyword("uint")) return Type::Uint;
    if (ts_.accept_keyword("address")) return Type::Address;
    if (ts_.accept_keyword("bool")) return Type::Bool;
    if (ts_.accept_keyword("map")) {
      ts_.expect_symbol("(");
      ts_.expect_keyword("address");
      ts_.expect_symbol("->");
      ts_.expect_keyword("uint");
      ts_.expect_symbol(")");
      return Type::Map;
    }
    ts_.fail();
  }

  StateVarDecl parse_state() {
    StateVarDecl s;
    s.span = ts_.expect_keyword("state").span;
    s.name = ts_.expect_kind(TokenKind::Identifier, "state variable name").text;
    ts_.expect_symbol(":");
    s.var_type = parse_type();
    if (ts_.accept_symbol("=")) s.initializer = parse_expr();
    return s;
  }

  std::uint64_t parse_count() {
    const Token& t = ts_.expect_kind(TokenKind::Number, "token count");
    auto v = parse_decimal(t.text);
    if (!v || *v == 0 || *v > 1'000'000) ts_.fail(t.span, "token count must be an integer in 1..1000000");
    return static_cast<std::uint64_t>(*v);
  }

  Consume parse_consume() {
    Consume c;
    c.span = ts_.expect_keyword("consume").span;
    c.port = ts_.expect_kind(TokenKind::Identifier, "port name").text;
    if (ts_.accept_symbol("[")) {
      do {
        c.patterns.push_back(ts_.expect_kind(TokenKind::Identifier, "pattern variable").text);
      } while (ts_.accept_symbol(","));
      ts_.expect_symbol("]");
      c.counts = {c.patterns.size()};
    } else if (ts_.accept_symbol("*")) {
      if (ts_.accept_symbol("(")) {
        c.counts.clear();
        do {
          c.counts.push_back(parse_count());
        } while (ts_.accept_symbol(","));
        ts_.expect_symbol(")");
      } else {
        c.counts = {parse_count()};
      }
    }
    return c;
  }

  ActionDecl parse_action() {
    ActionDecl a;
    a.span = ts_.expect_keyword("action").span;
    a.name = ts_.expect_kind(TokenKind::Identifier, "action name").text;
    while (!ts_.at_keyword("end")) {
      if (ts_.at_keyword("consume")) {
        a.consumes.push_back(parse_consume());
      } else if (ts_.accept_keyword("guard")) {
        a.guards.push_back(parse_expr());
      } else if (ts_.at_keyword("do")) {
        a.body.emplace_back(parse_assign());
      } else if (ts_.at_keyword("let")) {
        Let l;
        l.span = ts_.advance().span;
        l.name = ts_.expect_kind(TokenKind::Identifier, "local name").text;
        ts_.expect_symbol(":=");
        l.value = parse_expr();
        a.body.emplace_back(std::move(l));
      } else if (ts_.at_keyword("emit")) {
        Emit e;
        e.span = ts_.advance().span;
        e.port = ts_.expect_kind(TokenKind::Identifier, "port name").text;
        ts_.expect_symbol("(");
        do {
          e.values.push_back(parse_expr());
        } while (ts_.accept_symbol(","));
        ts_.expect_symbol(")");
        a.body.emplace_back(std::move(e));
      } else {
        ts_.fail();
      }
    }
    ts_.advance();
    return a;
  }

  Assign parse_assign() {
    Assign s;
    s.span = ts_.expect_keyword("do").span;
    s.target = ts_.expect_kind(TokenKind::Identifier, "assignment target").text;
    if (ts_.accept_symbol("[")) {
      s.key = parse_expr();
      ts_.expect_symbol("]");
    }
    ts_.expect_symbol(":=");
    s.value = parse_expr();
    return s;
  }

  FsmDecl parse_schedule() {
    FsmDecl f;
    f.span = ts_.expect_keyword("schedule").span;
    f.initial = ts_.expect_kind(TokenKind::Identifier, "initial state").text;
    while (!ts_.at_keyword("end")) {
      Transition t;
      const Token& from = ts_.expect_kind(TokenKind::Identifier, "state label");
      t.span = from.span;
      t.from = from.text;
      ts_.expect_symbol("(");
      t.action = ts_.expect_kind(TokenKind::Identifier, "action name").text;
      ts_.expect_symbol(")");
      ts_.expect_symbol("->");
      t.to = ts_.expect_kind(TokenKind::Identifier, "state label").text;
      f.transitions.push_back(std::move(t));
    }
    ts_.advance();
    return f;
  }

  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan span) {
    return Expr{Binary{op, std::move(lhs), std::move(rhs)}, std::move(span), std::nullopt};
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (ts_.at_keyword("or")) {
      SourceSpan span = ts_.advance().span;
      lhs = binary(BinaryOp::Or, std::move(lhs), parse_and(), span);
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (ts_.at_keyword("and")) {
      SourceSpan span = ts_.advance().span;
      lhs = binary(BinaryOp::And, std::move(lhs), parse_not(), span);
    }
    return lhs;
  }

  Expr parse_not() {
    if (ts_.at_keyword("not")) {
      SourceSpan span = ts_.advance().span;
      return Expr{Unary{UnaryOp::Not, parse_not()}, span, std::nullopt};
    }
    return parse_cmp();
  }

  Expr parse_cmp() {
    Expr lhs = parse_add();
    static constexpr std::array<std::pair<std::string_view, BinaryOp>, 6> kOps = {{
        {"==", BinaryOp::Eq},
        {"!=", BinaryOp::Ne},
        {"<=", BinaryOp::Le},
        {">=", BinaryOp::Ge},
        {"<", BinaryOp::Lt},
        {">", BinaryOp::Gt},
    }};
    for (auto [sym, op] : kOps) {
      if (ts_.at_symbol(sym)) {
        SourceSpan span = ts_.advance().span;
        return binary(op, std::move(lhs), parse_add(), span);
      }
    }
    return lhs;
  }

  Expr parse_add() {
    Expr lhs = parse_mul();
    for (;;) {
      if (ts_.at_symbol("+")) {
        SourceSpan span = ts_.advance().span;
        lhs = binary(BinaryOp::Add, std::move(lhs), parse_mul(), span);
      } else if (ts_.at_symbol("-")) {
        SourceSpan span = ts_.advance().span;
        lhs = binary(BinaryOp::Sub, std::move(lhs), parse_mul(), span);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_mul() {
    Expr lhs = parse_primary();
    for (;;) {
      BinaryOp op;
      if (ts_.at_symbol("*")) {
        op = BinaryOp::Mul;
      } else if (ts_.at_symbol("/")) {
        op = BinaryOp::Div;
      } else if (ts_.at_symbol("%")) {
        op = BinaryOp::Mod;
      } else {
        return lhs;
      }
      SourceSpan span = ts_.advance().span;
      lhs = binary(op, std::move(lhs), parse_primary(), span);
    }
  }

  Expr parse_primary() {
    if (ts_.at_kind(TokenKind::Number, "number")) {
      const Token& t = ts_.advance();
      Expr e{IntLit{}, t.span, std::nullopt};
      auto& lit = std::get<IntLit>(e.node);
      if (ts_.accept_keyword("ether")) {
        auto v = parse_ether(t.text);
        if (!v) ts_.fail(t.span, "ether amount '" + t.text + "' is not exact in wei or too large");
        lit.value = *v;
        lit.ether = true;
        return e;
      }
      ts_.accept_keyword("wei");
      if (t.text.find('.') != std::string::npos) {
        ts_.fail(t.span, "fractional literal '" + t.text + "' requires the 'ether' suffix");
      }
      auto v = parse_decimal(t.text);
      if (!v) ts_.fail(t.span, "integer literal '" + t.text + "' does not fit in 256 bits");
      lit.value = *v;
      return e;
    }
    if (ts_.at_kind(TokenKind::HexNumber, "address literal")) {
      const Token& t = ts_.advance();
      auto a = Address::parse(t.text);
      if (!a) ts_.fail(t.span, "address literal '" + t.text + "' exceeds 20 bytes");
      return Expr{AddrLit{*a}, t.span, std::nullopt};
    }
    if (ts_.at_keyword("true") || ts_.at_keyword("false")) {
      const Token& t = ts_.advance();
      return Expr{BoolLit{t.text == "true"}, t.span, std::nullopt};
    }
    if (ts_.at_kind(TokenKind::Identifier, "identifier")) {
      const Token& t = ts_.advance();
      if (ts_.accept_symbol("[")) {
        Expr key = parse_expr();
        ts_.expect_symbol("]");
        return Expr{Index{t.text, std::move(key)}, t.span, std::nullopt};
      }
      return Expr{NameRef{t.text}, t.span, std::nullopt};
    }
    if (ts_.accept_symbol("(")) {
      Expr inner = parse_expr();
      ts_.expect_symbol(")");
      return inner;
    }
    ts_.fail();
  }

  TokenStream ts_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& file) {
  return lex(source, file, kKeywords);
}

ActorDecl parse_actor(std::vector<Token> tokens, const std::string& file) {
  return ActorParser(std::move(tokens), file).run();
}

ActorDecl parse_actor_source(std::string_view source, const std::string& file) {
  return parse_actor(tokenize(source, file), file);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ActorDecl load_actor(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return resolve(parse_actor_source(text, path.string()));
}

}  // namespace actorforge::dsl
