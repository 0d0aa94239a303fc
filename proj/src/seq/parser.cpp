// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dsl/frontend.hpp"
#include "actorforge/lexer.hpp"
#include "actorforge/seq/frontend.hpp"

#include <array>

namespace actorforge::seq {

namespace {

constexpr std::array<std::string_view, 31> kKeywords = {
    "interface", "contract", "function", "constructor", "fallback", "receive",  "returns", "return",
    "public",    "external", "internal", "private",     "payable",  "view",     "pure",    "require",
    "if",        "else",     "send",     "uint",        "uint256",  "bool",     "address", "mapping",
    "true",      "false",    "ether",    "wei",         "msg",      "this",     "memory"};

// `pragma ...;` lines carry version syntax outside the token alphabet; blank
// them out (keeping newlines so spans stay exact).
std::string strip_pragmas(std::string_view src) {
  std::string out(src);
  std::size_t pos = 0;
  while (pos < out.size()) {
    std::size_t line_end = out.find('\n', pos);
    if (line_end == std::string::npos) line_end = out.size();
    std::size_t first = out.find_first_not_of(" \t\r", pos);
    if (first < line_end && out.compare(first, 6, "pragma") == 0) {
      std::size_t semi = out.find(';', first);
      std::size_t stop = semi == std::string::npos ? out.size() : semi + 1;
      for (std::size_t i = first; i < stop; ++i) {
        if (out[i] != '\n') out[i] = ' ';
      }
      pos = stop;
      continue;
    }
    pos = line_end + 1;
  }
  return out;
}

class UnitParser {
 public:
  UnitParser(std::vector<Token> tokens, std::string file) : ts_(std::move(tokens), std::move(file)) {}

  SourceUnit run() {
    SourceUnit unit;
    while (!ts_.at_end()) {
      if (ts_.at_keyword("contract") || ts_.at_keyword("interface")) {
        unit.contracts.push_back(parse_contract());
      } else {
        ts_.fail();
      }
    }
    return unit;
  }

 private:
  ContractDef parse_contract() {
    ContractDef c;
    const Token& kw = ts_.advance();
    c.is_interface = kw.text == "interface";
    c.span = kw.span;
    c.name = ts_.expect_kind(TokenKind::Identifier, "contract name").text;
    ts_.expect_symbol("{");
    while (!ts_.accept_symbol("}")) {
      if (ts_.at_keyword("function")) {
        FunctionDef f = parse_function();
        if (f.kind == FunctionKind::Fallback) {
          set_fallback(c, std::move(f));
        } else {
          c.functions.push_back(std::move(f));
        }
      } else if (ts_.at_keyword("constructor")) {
        if (c.constructor) ts_.fail(ts_.here(), "contract '" + c.name + "' declares two constructors");
        c.constructor = parse_special(FunctionKind::Constructor);
      } else if (ts_.at_keyword("fallback") || ts_.at_keyword("receive")) {
        set_fallback(c, parse_special(FunctionKind::Fallback));
      } else if (!c.is_interface && at_type_start()) {
        c.state_vars.push_back(parse_state_var());
      } else {
        ts_.fail();
      }
    }
    return c;
  }

  void set_fallback(ContractDef& c, FunctionDef f) {
    if (c.fallback) ts_.fail(f.span, "contract '" + c.name + "' declares more than one fallback");
    c.fallback = std::move(f);
  }

  bool at_type_start() {
    return ts_.at_keyword("uint") || ts_.at_keyword("uint256") || ts_.at_keyword("bool") ||
           ts_.at_keyword("address") || ts_.at_keyword("mapping") || ts_.at_kind(TokenKind::Identifier, "type name");
  }

  TypeName parse_type() {
    if (ts_.accept_keyword("uint") || ts_.accept_keyword("uint256")) return {TypeKind::Uint, ""};
    if (ts_.accept_keyword("bool")) return {TypeKind::Bool, ""};
    if (ts_.accept_keyword("address")) {
      ts_.accept_keyword("payable");
      return {TypeKind::Address, ""};
    }
    if (ts_.accept_keyword("mapping")) {
      ts_.expect_symbol("(");
      ts_.expect_keyword("address");
      ts_.expect_symbol("=>");
      if (!ts_.accept_keyword("uint") && !ts_.accept_keyword("uint256")) ts_.fail();
      ts_.expect_symbol(")");
      return {TypeKind::Mapping, ""};
    }
    return {TypeKind::Contract, ts_.expect_kind(TokenKind::Identifier, "type name").text};
  }

  StateVar parse_state_var() {
    StateVar v;
    v.span = ts_.here();
    v.type = parse_type();
    while (ts_.accept_keyword("public") || ts_.accept_keyword("private") || ts_.accept_keyword("internal")) {
    }
    v.name = ts_.expect_kind(TokenKind::Identifier, "state variable name").text;
    if (ts_.accept_symbol("=")) v.init = parse_expr();
    ts_.expect_symbol(";");
    return v;
  }

  std::vector<Param> parse_params() {
    std::vector<Param> params;
    ts_.expect_symbol("(");
    if (ts_.accept_symbol(")")) return params;
    do {
      Param p;
      p.type = parse_type();
      ts_.accept_keyword("memory");
      p.name = ts_.expect_kind(TokenKind::Identifier, "parameter name").text;
      params.push_back(std::move(p));
    } while (ts_.accept_symbol(","));
    ts_.expect_symbol(")");
    return params;
  }

  void parse_modifiers(FunctionDef& f) {
    for (;;) {
      if (ts_.accept_keyword("public")) {
        f.visibility = Visibility::Public;
      } else if (ts_.accept_keyword("external")) {
        f.visibility = Visibility::External;
      } else if (ts_.accept_keyword("internal")) {
        f.visibility = Visibility::Internal;
      } else if (ts_.accept_keyword("private")) {
        f.visibility = Visibility::Private;
      } else if (ts_.accept_keyword("payable")) {
        f.payable = true;
      } else if (ts_.accept_keyword("view") || ts_.accept_keyword("pure")) {
        f.view = true;
      } else {
        return;
      }
    }
  }

  void parse_tail(FunctionDef& f) {
    if (ts_.accept_keyword("returns")) {
      ts_.expect_symbol("(");
      f.returns = parse_type();
      if (ts_.at_kind(TokenKind::Identifier, "return name")) ts_.advance();
      ts_.expect_symbol(")");
    }
    if (ts_.accept_symbol(";")) {
      f.has_body = false;
      return;
    }
    f.body = parse_block();
  }

  FunctionDef parse_function() {
    FunctionDef f;
    f.span = ts_.expect_keyword("function").span;
    if (ts_.at_kind(TokenKind::Identifier, "function name")) {
      f.name = ts_.advance().text;
    } else {
      // legacy unnamed fallback: function () payable { ... }
      f.kind = FunctionKind::Fallback;
      f.name = "fallback";
    }
    f.params = parse_params();
    parse_modifiers(f);
    parse_tail(f);
    return f;
  }

  FunctionDef parse_special(FunctionKind kind) {
    FunctionDef f;
    f.kind = kind;
    f.span = ts_.advance().span;
    f.name = kind == FunctionKind::Constructor ? "constructor" : "fallback";
    f.params = parse_params();
    parse_modifiers(f);
    parse_tail(f);
    return f;
  }

  Block parse_block() {
    ts_.expect_symbol("{");
    Block b;
    while (!ts_.accept_symbol("}")) b.push_back(parse_stmt());
    return b;
  }

  Block parse_branch() {
    if (ts_.at_symbol("{")) return parse_block();
    Block b;
    b.push_back(parse_stmt());
    return b;
  }

  bool at_assign_op() {
    if (ts_.at_symbol("=")) return true;
    const Token& a = ts_.peek();
    const Token& b = ts_.peek(1);
    return a.kind == TokenKind::Symbol && (a.text == "+" || a.text == "-") && b.kind == TokenKind::Symbol &&
           b.text == "=" && b.span.line == a.span.line && b.span.column == a.span.column + 1;
  }

  Stmt parse_stmt() {
    Stmt s;
    s.span = ts_.here();
    if (ts_.accept_keyword("require")) {
      ts_.expect_symbol("(");
      Require r{parse_expr(), std::nullopt};
      if (ts_.accept_symbol(",")) r.message = ts_.expect_kind(TokenKind::String, "message string").text;
      ts_.expect_symbol(")");
      ts_.expect_symbol(";");
      s.node = std::move(r);
      return s;
    }
    if (ts_.accept_keyword("if")) {
      ts_.expect_symbol("(");
      Expr cond = parse_expr();
      ts_.expect_symbol(")");
      Block then_b = parse_branch();
      Block else_b;
      if (ts_.accept_keyword("else")) else_b = parse_branch();
      s.node = If{std::move(cond), std::move(then_b), std::move(else_b)};
      return s;
    }
    if (ts_.accept_keyword("return")) {
      Return r;
      if (!ts_.at_symbol(";")) r.value = parse_expr();
      ts_.expect_symbol(";");
      s.node = std::move(r);
      return s;
    }
    if (ts_.accept_keyword("send")) {
      ts_.expect_symbol("(");
      Expr to = parse_expr();
      ts_.expect_symbol(",");
      Expr amount = parse_expr();
      ts_.expect_symbol(")");
      ts_.expect_symbol(";");
      s.node = Send{std::move(to), std::move(amount)};
      return s;
    }
    const bool builtin_type = ts_.at_keyword("uint") || ts_.at_keyword("uint256") || ts_.at_keyword("bool") ||
                              (ts_.at_keyword("address") && !(ts_.peek(1).kind == TokenKind::Symbol &&
                                                              ts_.peek(1).text == "("));
    const bool named_type = ts_.peek().kind == TokenKind::Identifier && ts_.peek(1).kind == TokenKind::Identifier;
    if (builtin_type || named_type) {
      LocalDecl d;
      d.type = parse_type();
      ts_.accept_keyword("memory");
      d.name = ts_.expect_kind(TokenKind::Identifier, "variable name").text;
      if (ts_.accept_symbol("=")) d.init = parse_expr();
      ts_.expect_symbol(";");
      s.node = std::move(d);
      return s;
    }
    if (ts_.peek().kind == TokenKind::Identifier) {
      const Token& a = ts_.peek(1);
      bool assign_like = a.kind == TokenKind::Symbol && (a.text == "=" || a.text == "[" || a.text == "+" ||
                                                          a.text == "-");
      if (assign_like) {
        Token name = ts_.advance();
        std::optional<Expr> key;
        if (ts_.accept_symbol("[")) {
          key = parse_expr();
          ts_.expect_symbol("]");
        }
        if (!at_assign_op()) ts_.fail();
        std::string op = ts_.advance().text;
        if (op != "=") ts_.advance();
        Expr value = parse_expr();
        if (op != "=") {
          Expr current = key ? Expr{Index{name.text, *key}, name.span} : Expr{NameRef{name.text}, name.span};
          value = Expr{Binary{op == "+" ? BinaryOp::Add : BinaryOp::Sub, std::move(current), std::move(value)},
                       value.span};
        }
        ts_.expect_symbol(";");
        s.node = Assign{name.text, std::move(key), std::move(value)};
        return s;
      }
    }
    Expr e = parse_expr();
    if (!std::holds_alternative<Call>(e.node)) ts_.fail(e.span, "expression statement must be a call");
    ts_.expect_symbol(";");
    s.node = CallStmt{std::move(e)};
    return s;
  }

  Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan span) {
    return Expr{Binary{op, std::move(lhs), std::move(rhs)}, std::move(span)};
  }

  Expr parse_expr() { return parse_or(); }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (ts_.at_symbol("||")) {
      SourceSpan span = ts_.advance().span;
      lhs = binary(BinaryOp::Or, std::move(lhs), parse_and(), span);
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_cmp();
    while (ts_.at_symbol("&&")) {
      SourceSpan span = ts_.advance().span;
      lhs = binary(BinaryOp::And, std::move(lhs), parse_cmp(), span);
    }
    return lhs;
  }

  Expr parse_cmp() {
    Expr lhs = parse_add();
    static constexpr std::pair<std::string_view, BinaryOp> ops[] = {
        {"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}, {"<=", BinaryOp::Le},
        {">=", BinaryOp::Ge}, {"<", BinaryOp::Lt},  {">", BinaryOp::Gt}};
    for (const auto& [sym, op] : ops) {
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
      BinaryOp op;
      if (ts_.at_symbol("+")) {
        op = BinaryOp::Add;
      } else if (ts_.at_symbol("-")) {
        op = BinaryOp::Sub;
      } else {
        return lhs;
      }
      SourceSpan span = ts_.advance().span;
      lhs = binary(op, std::move(lhs), parse_mul(), span);
    }
  }

  Expr parse_mul() {
    Expr lhs = parse_unary();
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
      lhs = binary(op, std::move(lhs), parse_unary(), span);
    }
  }

  Expr parse_unary() {
    if (ts_.at_symbol("!")) {
      SourceSpan span = ts_.advance().span;
      return Expr{Not{parse_unary()}, span};
    }
    return parse_postfix();
  }

  std::vector<Expr> parse_args() {
    std::vector<Expr> args;
    ts_.expect_symbol("(");
    if (ts_.accept_symbol(")")) return args;
    do {
      args.push_back(parse_expr());
    } while (ts_.accept_symbol(","));
    ts_.expect_symbol(")");
    return args;
  }

  Expr parse_postfix() {
    Expr e = parse_primary();
    while (ts_.at_symbol(".")) {
      ts_.advance();
      const Token& member = ts_.expect_kind(TokenKind::Identifier, "member name");
      if (member.text == "balance" && !ts_.at_symbol("(") && !ts_.at_symbol("{")) {
        e = Expr{Balance{std::move(e)}, member.span};
        continue;
      }
      Call c;
      c.target = box<Expr>(std::move(e));
      c.function = member.text;
      if (ts_.accept_symbol("{")) {
        const Token& opt = ts_.expect_kind(TokenKind::Identifier, "call option");
        if (opt.text != "value") ts_.fail(opt.span, "unsupported call option '" + opt.text + "'");
        ts_.expect_symbol(":");
        c.value = box<Expr>(parse_expr());
        ts_.expect_symbol("}");
      }
      c.args = parse_args();
      e = Expr{std::move(c), member.span};
    }
    return e;
  }

  Expr parse_primary() {
    if (ts_.at_kind(TokenKind::Number, "number")) {
      const Token& t = ts_.advance();
      if (ts_.accept_keyword("ether")) {
        auto v = parse_ether(t.text);
        if (!v) ts_.fail(t.span, "ether amount '" + t.text + "' is not exact in wei or too large");
        return Expr{IntLit{*v}, t.span};
      }
      ts_.accept_keyword("wei");
      auto v = parse_decimal(t.text);
      if (!v) ts_.fail(t.span, "integer literal '" + t.text + "' is not a 256-bit integer");
      return Expr{IntLit{*v}, t.span};
    }
    if (ts_.at_kind(TokenKind::HexNumber, "address literal")) {
      const Token& t = ts_.advance();
      auto a = Address::parse(t.text);
      if (!a) ts_.fail(t.span, "address literal '" + t.text + "' exceeds 20 bytes");
      return Expr{AddrLit{*a}, t.span};
    }
    if (ts_.at_keyword("true") || ts_.at_keyword("false")) {
      const Token& t = ts_.advance();
      return Expr{BoolLit{t.text == "true"}, t.span};
    }
    if (ts_.at_keyword("msg")) {
      SourceSpan span = ts_.advance().span;
      ts_.expect_symbol(".");
      const Token& m = ts_.expect_kind(TokenKind::Identifier, "'sender' or 'value'");
      if (m.text == "sender") return Expr{MsgSender{}, span};
      if (m.text == "value") return Expr{MsgValue{}, span};
      ts_.fail(m.span, "unknown msg member '" + m.text + "'");
    }
    if (ts_.at_keyword("this")) return Expr{This{}, ts_.advance().span};
    if (ts_.at_keyword("address")) {
      SourceSpan span = ts_.advance().span;
      ts_.expect_symbol("(");
      Expr inner = parse_expr();
      ts_.expect_symbol(")");
      return Expr{Cast{{TypeKind::Address, ""}, std::move(inner)}, span};
    }
    if (ts_.at_kind(TokenKind::Identifier, "identifier")) {
      const Token& t = ts_.advance();
      if (ts_.at_symbol("(")) {
        Call c;
        c.function = t.text;
        c.args = parse_args();
        return Expr{std::move(c), t.span};
      }
      if (ts_.accept_symbol("[")) {
        Expr key = parse_expr();
        ts_.expect_symbol("]");
        return Expr{Index{t.text, std::move(key)}, t.span};
      }
      return Expr{NameRef{t.text}, t.span};
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

SourceUnit parse_unit(std::string_view source, const std::string& file) {
  std::string text = strip_pragmas(source);
  return UnitParser(lex(text, file, kKeywords), file).run();
}

SourceUnit parse_contracts(std::string_view source, const std::string& file) {
  SourceUnit unit = parse_unit(source, file);
  auto diags = resolve_unit(unit);
  if (!diags.empty()) throw ResolveError(std::move(diags));
  return unit;
}

SourceUnit load_contracts(const std::filesystem::path& path) {
  return parse_contracts(dsl::read_text_file(path), path.string());
}

}  // namespace actorforge::seq
