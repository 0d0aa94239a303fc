// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dsl/frontend.hpp"

#include <map>
#include <set>

namespace actorforge::dsl {

namespace {

enum class Context { Initializer, Guard, Body };

class Resolver {
 public:
  explicit Resolver(ActorDecl& decl) : decl_(decl) {}

  std::vector<Diagnostic> run() {
    check_unique_names();
    for (auto& s : decl_.state_vars) resolve_state(s);
    for (auto& a : decl_.actions) resolve_action(a);
    if (decl_.schedule) resolve_schedule(*decl_.schedule);
    return std::move(diags_);
  }

 private:
  struct Symbol {
    Binding binding;
    Type type;
  };

  void error(std::string code, const SourceSpan& span, std::string message) {
    diags_.push_back(Diagnostic{span, Severity::Error, std::move(code), std::move(message)});
  }

  void check_unique_names() {
    std::set<std::string> ports;
    for (auto* list : {&decl_.inputs, &decl_.outputs}) {
      for (const auto& p : *list) {
        if (!ports.insert(p.name).second) error("NameError", p.span, "duplicate port '" + p.name + "'");
      }
    }
    std::set<std::string> states;
    for (const auto& s : decl_.state_vars) {
      if (!states.insert(s.name).second) {
        error("NameError", s.span, "duplicate state variable '" + s.name + "'");
      } else if (ports.count(s.name)) {
        error("NameError", s.span, "state variable '" + s.name + "' shadows a port");
      }
    }
    std::set<std::string> actions;
    for (const auto& a : decl_.actions) {
      if (!actions.insert(a.name).second) error("NameError", a.span, "duplicate action '" + a.name + "'");
    }
  }

  void resolve_state(StateVarDecl& s) {
    if (!s.initializer) return;
    if (s.var_type == Type::Map) {
      error("TypeError", s.initializer->span, "map state variable '" + s.name + "' cannot have an initializer");
      return;
    }
    scope_.clear();
    auto t = type_of(*s.initializer, Context::Initializer);
    if (t && *t != s.var_type) {
      error("TypeError", s.initializer->span,
            "initializer of '" + s.name + "' has type " + std::string(to_string(*t)) + ", expected " +
                std::string(to_string(s.var_type)));
    }
  }

  void bind(const std::string& name, Symbol sym, const SourceSpan& span) {
    if (decl_.find_state(name) || decl_.find_port(name) || scope_.count(name)) {
      error("NameError", span, "'" + name + "' is already declared");
      return;
    }
    scope_[name] = sym;
  }

  void resolve_action(ActionDecl& a) {
    scope_.clear();
    std::set<std::string> consumed;
    bool msg_bound = false;
    for (auto& c : a.consumes) {
      const PortDecl* port = decl_.find_port(c.port);
      if (!port) {
        error("NameError", c.span, "unknown port '" + c.port + "'");
        continue;
      }
      if (port->direction != Direction::Input) {
        error("DirectionError", c.span, "cannot consume from output port '" + c.port + "'");
        continue;
      }
      if (!consumed.insert(c.port).second) {
        error("TypeError", c.span, "port '" + c.port + "' is consumed twice by action '" + a.name + "'");
        continue;
      }
      if (port->token_type == Type::Msg) {
        if (!c.patterns.empty() || c.counts != std::vector<std::uint64_t>{1}) {
          error("TypeError", c.span, "msg port '" + c.port + "' is consumed one request at a time and binds sender/value implicitly");
          continue;
        }
        if (msg_bound) {
          error("NameError", c.span, "action '" + a.name + "' consumes two msg ports; sender/value would be bound twice");
          continue;
        }
        msg_bound = true;
        bind(std::string(kSenderVar), {Binding::Pattern, Type::Address}, c.span);
        bind(std::string(kValueVar), {Binding::Pattern, Type::Uint}, c.span);
      } else {
        for (const auto& p : c.patterns) bind(p, {Binding::Pattern, port->token_type}, c.span);
      }
    }

    for (auto& g : a.guards) {
      auto t = type_of(g, Context::Guard);
      if (t && *t != Type::Bool) error("TypeError", g.span, "guard must be boolean, found " + std::string(to_string(*t)));
    }

    for (auto& st : a.body) {
      std::visit([&](auto& s) { resolve_stmt(s); }, st);
    }
  }

  void resolve_stmt(Assign& s) {
    std::optional<Type> value_type = type_of(s.value, Context::Body);
    std::optional<Type> key_type;
    if (s.key) key_type = type_of(*s.key, Context::Body);

    if (decl_.find_port(s.target)) {
      error("DirectionError", s.span, "cannot assign to port '" + s.target + "'; use emit");
      return;
    }
    const StateVarDecl* var = decl_.find_state(s.target);
    if (!var) {
      if (scope_.count(s.target)) {
        error("TypeError", s.span, "'" + s.target + "' is not a state variable and cannot be assigned");
      } else {
        error("NameError", s.span, "unknown state variable '" + s.target + "'");
      }
      return;
    }
    if (var->var_type == Type::Map) {
      if (!s.key) {
        error("TypeError", s.span, "map '" + s.target + "' must be assigned element-wise");
        return;
      }
      if (key_type && *key_type != Type::Address) error("TypeError", s.key->span, "map key must be an address");
      if (value_type && *value_type != Type::Uint) error("TypeError", s.value.span, "map element must be uint");
      return;
    }
    if (s.key) {
      error("TypeError", s.span, "'" + s.target + "' is not a map");
      return;
    }
    if (value_type && *value_type != var->var_type) {
      error("TypeError", s.value.span,
            "cannot assign " + std::string(to_string(*value_type)) + " to '" + s.target + "' of type " +
                std::string(to_string(var->var_type)));
    }
  }

  void resolve_stmt(Let& s) {
    auto t = type_of(s.value, Context::Body);
    s.type = t;
    bind(s.name, {Binding::Local, t.value_or(Type::Uint)}, s.span);
  }

  void resolve_stmt(Emit& s) {
    std::vector<std::optional<Type>> types;
    for (auto& v : s.values) types.push_back(type_of(v, Context::Body));
    const PortDecl* port = decl_.find_port(s.port);
    if (!port) {
      error("NameError", s.span, "unknown port '" + s.port + "'");
      return;
    }
    if (port->direction != Direction::Output) {
      error("DirectionError", s.span, "cannot emit to input port '" + s.port + "'");
      return;
    }
    const Type want = port->token_type == Type::Msg ? Type::Uint : port->token_type;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (types[i] && *types[i] != want) {
        error("TypeError", s.values[i].span,
              "port '" + s.port + "' carries " + std::string(to_string(want)) + ", found " +
                  std::string(to_string(*types[i])));
      }
    }
  }

  std::optional<Type> lookup(const std::string& name, const SourceSpan& span, Context ctx, Binding& binding) {
    if (decl_.find_port(name)) {
      error("DirectionError", span, "port '" + name + "' cannot be read inside an expression; consume it with a pattern");
      return std::nullopt;
    }
    if (ctx == Context::Initializer) {
      error("TypeError", span, "initializer must be a constant expression, found '" + name + "'");
      return std::nullopt;
    }
    if (const StateVarDecl* s = decl_.find_state(name)) {
      binding = Binding::State;
      return s->var_type;
    }
    auto it = scope_.find(name);
    if (it == scope_.end()) {
      error("NameError", span, "unbound identifier '" + name + "'");
      return std::nullopt;
    }
    if (ctx == Context::Guard && it->second.binding == Binding::Local) {
      error("NameError", span, "local '" + name + "' is not visible in a guard");
      return std::nullopt;
    }
    binding = it->second.binding;
    return it->second.type;
  }

  std::optional<Type> type_of(Expr& e, Context ctx) {
    e.type = infer(e, ctx);
    return e.type;
  }

  std::optional<Type> infer(Expr& e, Context ctx) {
    if (std::holds_alternative<IntLit>(e.node)) return Type::Uint;
    if (std::holds_alternative<BoolLit>(e.node)) return Type::Bool;
    if (std::holds_alternative<AddrLit>(e.node)) return Type::Address;
    if (auto* n = std::get_if<NameRef>(&e.node)) {
      auto t = lookup(n->name, e.span, ctx, n->binding);
      if (t == Type::Map) {
        error("TypeError", e.span, "map '" + n->name + "' can only be indexed");
        return std::nullopt;
      }
      return t;
    }
    if (auto* ix = std::get_if<Index>(&e.node)) {
      auto key = type_of(*ix->key, ctx);
      auto t = lookup(ix->map, e.span, ctx, ix->binding);
      if (!t) return std::nullopt;
      if (*t != Type::Map) {
        error("TypeError", e.span, "'" + ix->map + "' is not a map");
        return std::nullopt;
      }
      if (key && *key != Type::Address) {
        error("TypeError", ix->key->span, "map key must be an address");
        return std::nullopt;
      }
      return Type::Uint;
    }
    if (auto* u = std::get_if<Unary>(&e.node)) {
      auto t = type_of(*u->operand, ctx);
      if (t && *t != Type::Bool) {
        error("TypeError", e.span, "'not' needs a boolean operand");
        return std::nullopt;
      }
      return t ? std::optional(Type::Bool) : std::nullopt;
    }
    auto& b = std::get<Binary>(e.node);
    auto lt = type_of(*b.lhs, ctx);
    auto rt = type_of(*b.rhs, ctx);
    if (!lt || !rt) return std::nullopt;
    const std::string op(to_string(b.op));
    switch (b.op) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod:
        if (*lt != Type::Uint || *rt != Type::Uint) break;
        return Type::Uint;
      case BinaryOp::Eq:
      case BinaryOp::Ne:
        if (*lt != *rt) break;
        return Type::Bool;
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        if (*lt != Type::Uint || *rt != Type::Uint) break;
        return Type::Bool;
      case BinaryOp::And:
      case BinaryOp::Or:
        if (*lt != Type::Bool || *rt != Type::Bool) break;
        return Type::Bool;
    }
    error("TypeError", e.span,
          "operand mismatch for '" + op + "': " + std::string(to_string(*lt)) + " and " +
              std::string(to_string(*rt)));
    return std::nullopt;
  }

  void resolve_schedule(const FsmDecl& f) {
    std::set<std::pair<std::string, std::string>> seen;
    bool initial_used = false;
    for (const auto& t : f.transitions) {
      if (!decl_.find_action(t.action)) error("NameError", t.span, "schedule names unknown action '" + t.action + "'");
      if (!seen.insert({t.from, t.action}).second) {
        error("NameError", t.span, "duplicate transition " + t.from + " (" + t.action + ")");
      }
      if (t.from == f.initial) initial_used = true;
    }
    if (!initial_used && !f.transitions.empty()) {
      error("NameError", f.span, "initial state '" + f.initial + "' has no outgoing transition");
    }
  }

  ActorDecl& decl_;
  std::map<std::string, Symbol> scope_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> resolve_in_place(ActorDecl& decl) { return Resolver(decl).run(); }

ActorDecl resolve(ActorDecl decl) {
  auto diags = resolve_in_place(decl);
  if (!diags.empty()) throw ResolveError(std::move(diags));
  return decl;
}

}  // namespace actorforge::dsl
