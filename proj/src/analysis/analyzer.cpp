// SPDX-License-Identifier: Apache-2.0
#include "actorforge/analysis/analyzer.hpp"

#include "actorforge/codegen/codegen.hpp"
#include "actorforge/seq/print.hpp"

#include <algorithm>

namespace actorforge::analysis {

std::string_view to_string(FindingClass c) {
  return c == FindingClass::SuppressedByMutex ? "SuppressedByMutex" : "TruePositiveCandidate";
}

std::string render(const Finding& f) {
  return f.span.file + ":" + std::to_string(f.span.line) + ":" + std::to_string(f.span.column) + ": " + f.rule_id +
         " " + std::string(to_string(f.severity)) + ": " + f.message;
}

nlohmann::ordered_json to_json(const Finding& f) {
  nlohmann::ordered_json j;
  j["rule"] = f.rule_id;
  j["function"] = f.function;
  j["file"] = f.span.file;
  j["line"] = f.span.line;
  j["column"] = f.span.column;
  j["severity"] = std::string(to_string(f.severity));
  j["classification"] = std::string(to_string(f.classification));
  j["statement"] = f.statement_index;
  j["message"] = f.message;
  return j;
}

namespace {

using namespace actorforge::seq;

bool has_external_call(const Expr& e) {
  bool found = false;
  visit_exprs(e, [&](const Expr& x) {
    if (const auto* c = std::get_if<Call>(&x.node)) found |= c->target.has_value();
  });
  return found;
}

bool has_external_call(const std::optional<Expr>& e) { return e && has_external_call(*e); }

std::vector<const FunctionDef*> analyzed_functions(const ContractDef& def) {
  std::vector<const FunctionDef*> out;
  for (const auto& f : def.functions) out.push_back(&f);
  if (def.fallback) out.push_back(&*def.fallback);
  return out;
}

class InteractionWalker {
 public:
  InteractionWalker(const FunctionDef& f, std::vector<Finding>& out) : f_(f), out_(out) {}

  void run() { walk(f_.body, false); }

 private:
  bool walk(const Block& b, bool seen) {
    for (const auto& s : b) seen = stmt(s, seen);
    return seen;
  }

  bool stmt(const Stmt& s, bool seen) {
    const std::size_t index = index_++;
    return std::visit(
        [&](const auto& n) -> bool {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Require>) {
            return seen || has_external_call(n.condition);
          } else if constexpr (std::is_same_v<N, Assign>) {
            const bool inside = has_external_call(n.value) || has_external_call(n.key);
            if (n.kind == NameKind::State && (seen || inside)) report(s, index, n.target);
            return seen || inside;
          } else if constexpr (std::is_same_v<N, LocalDecl>) {
            return seen || has_external_call(n.init);
          } else if constexpr (std::is_same_v<N, If>) {
            seen = seen || has_external_call(n.condition);
            const bool after_then = walk(*n.then_branch, seen);
            const bool after_else = walk(*n.else_branch, seen);
            return after_then || after_else;
          } else if constexpr (std::is_same_v<N, Send>) {
            return true;
          } else if constexpr (std::is_same_v<N, CallStmt>) {
            return seen || has_external_call(n.call);
          } else {
            return seen || has_external_call(n.value);
          }
        },
        s.node);
  }

  void report(const Stmt& s, std::size_t index, const std::string& var) {
    out_.push_back(Finding{std::string(kEffectsAfterInteraction), f_.name, s.span, Severity::Error,
                           FindingClass::TruePositiveCandidate, index,
                           "'" + f_.name + "' writes '" + var + "' after an external call or value transfer"});
  }

  const FunctionDef& f_;
  std::vector<Finding>& out_;
  std::size_t index_ = 0;
};

bool mutates(const Block& b) {
  for (const auto& s : b) {
    bool m = std::visit(
        [](const auto& n) -> bool {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Assign>) {
            return n.kind == NameKind::State || has_external_call(n.value);
          } else if constexpr (std::is_same_v<N, If>) {
            return has_external_call(n.condition) || mutates(*n.then_branch) || mutates(*n.else_branch);
          } else if constexpr (std::is_same_v<N, Send>) {
            return true;
          } else if constexpr (std::is_same_v<N, CallStmt>) {
            return has_external_call(n.call);
          } else if constexpr (std::is_same_v<N, Require>) {
            return has_external_call(n.condition);
          } else if constexpr (std::is_same_v<N, LocalDecl>) {
            return has_external_call(n.init);
          } else {
            return has_external_call(n.value);
          }
        },
        s.node);
    if (m) return true;
  }
  return false;
}

bool is_lock_write(const Stmt& s, const std::string& lock, bool value) {
  const auto* a = std::get_if<Assign>(&s.node);
  if (!a || a->target != lock || a->key) return false;
  const auto* b = std::get_if<BoolLit>(&a->value.node);
  return b && b->value == value;
}

// The lock shared by every externally callable state-mutating function, if
// there is one.
std::optional<std::string> contract_lock(const ContractDef& def) {
  std::optional<std::string> common;
  for (const FunctionDef* f : analyzed_functions(def)) {
    if (!f->externally_callable() || f->view || !mutates(f->body)) continue;
    auto l = lock_of(def, *f);
    if (!l || (common && *common != *l)) return std::nullopt;
    common = l;
  }
  return common;
}

void flatten(const Block& b, std::vector<const Stmt*>& out) {
  for (const auto& s : b) {
    out.push_back(&s);
    if (const auto* i = std::get_if<If>(&s.node)) {
      flatten(*i->then_branch, out);
      flatten(*i->else_branch, out);
    }
  }
}

bool is_interaction(const Stmt& s) {
  if (std::holds_alternative<Send>(s.node)) return true;
  if (const auto* c = std::get_if<CallStmt>(&s.node)) return has_external_call(c->call);
  if (const auto* a = std::get_if<Assign>(&s.node)) return has_external_call(a->value);
  if (const auto* d = std::get_if<LocalDecl>(&s.node)) return has_external_call(d->init);
  return false;
}

}  // namespace

std::vector<Finding> check_effects_after_interaction(const ContractDef& def) {
  std::vector<Finding> out;
  for (const FunctionDef* f : analyzed_functions(def)) InteractionWalker(*f, out).run();
  return out;
}

std::optional<std::string> lock_of(const ContractDef& def, const FunctionDef& f) {
  if (f.body.size() < 3) return std::nullopt;
  const auto* req = std::get_if<Require>(&f.body.front().node);
  if (!req) return std::nullopt;
  const auto* neg = std::get_if<Not>(&req->condition.node);
  if (!neg) return std::nullopt;
  const auto* var = std::get_if<NameRef>(&neg->operand->node);
  if (!var) return std::nullopt;
  const StateVar* sv = def.find_state(var->name);
  if (!sv || sv->type.kind != TypeKind::Bool) return std::nullopt;
  if (!is_lock_write(f.body[1], var->name, true) || !is_lock_write(f.body.back(), var->name, false)) {
    return std::nullopt;
  }
  return var->name;
}

std::vector<Finding> check_with_mutex_awareness(const ContractDef& def) {
  std::vector<Finding> findings = check_effects_after_interaction(def);
  const auto lock = contract_lock(def);
  if (!lock) return findings;
  for (auto& f : findings) {
    const FunctionDef* fn = f.function == "fallback" && def.fallback ? &*def.fallback : def.find_function(f.function);
    if (fn && lock_of(def, *fn) == lock) {
      f.severity = Severity::Info;
      f.classification = FindingClass::SuppressedByMutex;
      f.message += " (suppressed: '" + *lock + "' brackets every entry point)";
    }
  }
  return findings;
}

std::size_t count_errors(const std::vector<Finding>& findings) {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [](const Finding& f) { return f.severity == Severity::Error; }));
}

VerifyResult verify_generated(const dsl::ActorDecl& decl, const ContractDef& def) {
  VerifyResult result;
  auto fail = [&](const char* rule, const std::string& fn, const SourceSpan& span, std::string message) {
    result.findings.push_back(
        Finding{rule, fn, span, Severity::Error, FindingClass::TruePositiveCandidate, 0, std::move(message)});
  };

  for (const FunctionDef* f : analyzed_functions(def)) {
    if (f->externally_callable() && !decl.find_action(f->name)) {
      fail("VG-a", f->name, f->span, "public function '" + f->name + "' has no source action");
    }
  }
  const auto shared_lock = contract_lock(def);

  for (const auto& action : decl.actions) {
    const FunctionDef* f = def.find_function(action.name);
    if (!f || !f->externally_callable()) {
      fail("VG-a", action.name, def.span, "no public function for action '" + action.name + "'");
      continue;
    }
    // the lock named by the entry require, if any
    std::optional<std::string> lock;
    if (!f->body.empty()) {
      if (const auto* req = std::get_if<Require>(&f->body.front().node)) {
        if (const auto* neg = std::get_if<Not>(&req->condition.node)) {
          if (const auto* var = std::get_if<NameRef>(&neg->operand->node)) {
            const StateVar* sv = def.find_state(var->name);
            if (sv && sv->type.kind == TypeKind::Bool) lock = var->name;
          }
        }
      }
    }
    if (!lock || f->body.size() < 2 || !is_lock_write(f->body[1], *lock, true)) {
      fail("VG-d", f->name, f->span, "'" + f->name + "' does not acquire a lock as its first statement");
    } else if (!is_lock_write(f->body.back(), *lock, false)) {
      fail("VG-d", f->name, f->span, "'" + f->name + "' does not release '" + *lock + "' as its last statement");
    }

    std::vector<const Stmt*> flat;
    flatten(f->body, flat);
    auto is_effect = [&](const Stmt& s) {
      const auto* a = std::get_if<Assign>(&s.node);
      return a && a->kind == NameKind::State && !(lock && a->target == *lock);
    };
    std::size_t first_write = flat.size();
    std::size_t last_write = 0;
    bool any_write = false;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      if (!is_effect(*flat[i])) continue;
      first_write = std::min(first_write, i);
      last_write = i;
      any_write = true;
    }

    for (const auto& g : action.guards) {
      const std::string want = print_expr(codegen::translate_expr(action, g));
      bool found = false;
      for (std::size_t i = 0; i < first_write && !found; ++i) {
        if (const auto* r = std::get_if<Require>(&flat[i]->node)) found = print_expr(r->condition) == want;
      }
      if (!found) fail("VG-b", f->name, f->span, "guard '" + want + "' is not required before the first storage write");
    }

    const bool locked = shared_lock && lock_of(def, *f) == shared_lock;
    if (any_write && !locked) {
      for (std::size_t i = 0; i < last_write; ++i) {
        if (is_interaction(*flat[i])) {
          fail("VG-c", f->name, flat[i]->span, "'" + f->name + "' interacts before its last storage write");
          break;
        }
      }
    }
  }
  return result;
}

}  // namespace actorforge::analysis
