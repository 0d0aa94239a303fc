// SPDX-License-Identifier: Apache-2.0
#include "actorforge/seq/vm.hpp"

#include <algorithm>

namespace actorforge::seq {

std::string_view to_string(RevertReason r) {
  switch (r) {
    case RevertReason::Require: return "Require";
    case RevertReason::OutOfDepth: return "OutOfDepth";
    case RevertReason::InsufficientBalance: return "InsufficientBalance";
    case RevertReason::Overflow: return "Overflow";
    case RevertReason::Underflow: return "Underflow";
    case RevertReason::DivisionByZero: return "DivisionByZero";
    case RevertReason::NotPayable: return "NotPayable";
    case RevertReason::UnknownFunction: return "UnknownFunction";
    case RevertReason::NoFallback: return "NoFallback";
    case RevertReason::NotAContract: return "NotAContract";
    case RevertReason::StatementBudget: return "StatementBudget";
  }
  return "?";
}

const Account* World::find(const Address& a) const {
  auto it = accounts.find(a);
  return it == accounts.end() ? nullptr : &it->second;
}

uint256 World::total_balance() const {
  uint256 sum = 0;
  for (const auto& [addr, acct] : accounts) sum += acct.balance;
  return sum;
}

namespace {

Value default_value(const TypeName& t) {
  switch (t.kind) {
    case TypeKind::Uint:
      return uint256(0);
    case TypeKind::Bool:
      return false;
    case TypeKind::Address:
    case TypeKind::Contract:
      return Address{};
    case TypeKind::Mapping:
      return UintMap{};
  }
  return uint256(0);
}

nlohmann::ordered_json value_json(const Value& v) {
  if (auto* u = std::get_if<uint256>(&v)) return to_decimal(*u);
  if (auto* b = std::get_if<bool>(&v)) return *b;
  if (auto* a = std::get_if<Address>(&v)) return a->hex();
  return describe(v);
}

nlohmann::ordered_json frame_json(nlohmann::ordered_json j, const CallFrame& f) {
  j["caller"] = f.caller.hex();
  j["callee"] = f.callee.hex();
  j["function"] = f.function;
  j["value"] = to_decimal(f.value);
  j["depth"] = f.depth;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const TraceEvent& e) {
  return std::visit(
      [](const auto& ev) {
        using E = std::decay_t<decltype(ev)>;
        nlohmann::ordered_json j;
        if constexpr (std::is_same_v<E, CallEnter>) {
          j["event"] = "CallEnter";
          j = frame_json(std::move(j), ev.frame);
        } else if constexpr (std::is_same_v<E, CallExit>) {
          j["event"] = "CallExit";
          j = frame_json(std::move(j), ev.frame);
          j["outcome"] = ev.success ? "Success" : "Reverted";
          if (ev.reason) j["reason"] = std::string(to_string(*ev.reason));
        } else if constexpr (std::is_same_v<E, Transfer>) {
          j["event"] = "Transfer";
          j["from"] = ev.from.hex();
          j["to"] = ev.to.hex();
          j["amount"] = to_decimal(ev.amount);
        } else if constexpr (std::is_same_v<E, StorageWrite>) {
          j["event"] = "StorageWrite";
          j["address"] = ev.address.hex();
          j["var"] = ev.var;
          if (ev.key) j["key"] = ev.key->hex();
          j["old"] = value_json(ev.old_value);
          j["new"] = value_json(ev.new_value);
        } else {
          j["event"] = "Revert";
          j["reason"] = std::string(to_string(ev.reason));
          j["message"] = ev.message;
          j["depth"] = ev.depth;
        }
        return j;
      },
      e);
}

struct Vm::Impl {
  struct Revert {
    RevertReason reason;
    std::string message;
  };

  struct BalanceUndo {
    Address account;
    uint256 old;
  };
  struct VarUndo {
    Address account;
    std::string var;
    Value old;
  };
  struct MapUndo {
    Address account;
    std::string var;
    Address key;
    std::optional<uint256> old;  // empty: key was absent
  };
  struct CreateUndo {
    Address account;
  };
  using Undo = std::variant<BalanceUndo, VarUndo, MapUndo, CreateUndo>;

  struct Ctx {
    CallFrame frame;
    const ContractDef* code = nullptr;
    std::map<std::string, Value> locals;
  };

  Vm& vm;
  std::vector<Undo> journal;

  explicit Impl(Vm& v) : vm(v) {}

  void emit(TraceEvent e) {
    vm.trace_.push_back(std::move(e));
    if (vm.observer_) vm.observer_(vm.trace_.back(), vm.world_);
  }

  void rollback(std::size_t mark) {
    while (journal.size() > mark) {
      std::visit(
          [&](auto& u) {
            using U = std::decay_t<decltype(u)>;
            if constexpr (std::is_same_v<U, BalanceUndo>) {
              vm.world_.accounts.at(u.account).balance = u.old;
            } else if constexpr (std::is_same_v<U, VarUndo>) {
              vm.world_.accounts.at(u.account).storage.at(u.var) = u.old;
            } else if constexpr (std::is_same_v<U, MapUndo>) {
              auto& m = std::get<UintMap>(vm.world_.accounts.at(u.account).storage.at(u.var));
              if (u.old) {
                m[u.key] = *u.old;
              } else {
                m.erase(u.key);
              }
            } else {
              vm.world_.accounts.erase(u.account);
            }
          },
          journal.back());
      journal.pop_back();
    }
  }

  Account& account_for_credit(const Address& a) {
    auto it = vm.world_.accounts.find(a);
    if (it != vm.world_.accounts.end()) return it->second;
    journal.push_back(CreateUndo{a});
    Account acct;
    acct.address = a;
    return vm.world_.accounts.emplace(a, std::move(acct)).first->second;
  }

  void move_value(const Address& from, const Address& to, const uint256& amount) {
    if (amount == 0) return;
    auto it = vm.world_.accounts.find(from);
    if (it == vm.world_.accounts.end() || it->second.balance < amount) {
      throw Revert{RevertReason::InsufficientBalance,
                   from.hex() + " cannot pay " + to_decimal(amount) + " wei"};
    }
    if (from == to) {
      emit(Transfer{from, to, amount});
      return;
    }
    Account& dst = account_for_credit(to);
    Account& src = vm.world_.accounts.at(from);
    uint256 credited;
    try {
      credited = checked_add(dst.balance, amount);
    } catch (const ArithmeticError&) {
      throw Revert{RevertReason::Overflow, "balance overflow"};
    }
    journal.push_back(BalanceUndo{from, src.balance});
    src.balance -= amount;
    journal.push_back(BalanceUndo{to, dst.balance});
    dst.balance = credited;
    emit(Transfer{from, to, amount});
  }

  void write_state(const Address& self, const std::string& var, const std::optional<Address>& key, Value v) {
    Account& acct = vm.world_.accounts.at(self);
    Value& slot = acct.storage.at(var);
    if (key) {
      auto& m = std::get<UintMap>(slot);
      auto it = m.find(*key);
      std::optional<uint256> old;
      if (it != m.end()) old = it->second;
      const uint256 nv = std::get<uint256>(v);
      journal.push_back(MapUndo{self, var, *key, old});
      m[*key] = nv;
      emit(StorageWrite{self, var, key, old.value_or(0), nv});
    } else {
      journal.push_back(VarUndo{self, var, slot});
      Value old = slot;
      slot = v;
      emit(StorageWrite{self, var, std::nullopt, std::move(old), std::move(v)});
    }
  }

  // ---- expressions --------------------------------------------------------

  template <class T>
  static const T& as(const Value& v, const char* what) {
    if (auto* p = std::get_if<T>(&v)) return *p;
    throw Revert{RevertReason::Require, std::string("type mismatch: expected ") + what + ", got " + describe(v)};
  }

  static Address to_address(const Value& v) {
    if (auto* a = std::get_if<Address>(&v)) return *a;
    if (auto* u = std::get_if<uint256>(&v)) {
      if ((*u >> 160) != 0) throw Revert{RevertReason::Overflow, "integer does not fit in an address"};
      static constexpr char kDigits[] = "0123456789abcdef";
      std::string hex(2 * Address::kSize, '0');
      uint256 x = *u;
      for (std::size_t i = hex.size(); i-- > 0; x >>= 4) hex[i] = kDigits[static_cast<unsigned>(x & 0xf)];
      return *Address::parse("0x" + hex);
    }
    throw Revert{RevertReason::Require, "cannot convert " + describe(v) + " to an address"};
  }

  static uint256 arith(BinaryOp op, const uint256& a, const uint256& b) {
    try {
      switch (op) {
        case BinaryOp::Add: return checked_add(a, b);
        case BinaryOp::Sub: return checked_sub(a, b);
        case BinaryOp::Mul: return checked_mul(a, b);
        case BinaryOp::Div: return checked_div(a, b);
        case BinaryOp::Mod: return checked_mod(a, b);
        default: break;
      }
    } catch (const ArithmeticError& e) {
      switch (e.fault()) {
        case ArithFault::Overflow: throw Revert{RevertReason::Overflow, "arithmetic overflow"};
        case ArithFault::Underflow: throw Revert{RevertReason::Underflow, "arithmetic underflow"};
        case ArithFault::DivisionByZero: throw Revert{RevertReason::DivisionByZero, "division by zero"};
      }
    }
    throw Revert{RevertReason::Require, "not an arithmetic operator"};
  }

  const Value& read_state(const Ctx& ctx, const std::string& name) {
    const Account& acct = vm.world_.accounts.at(ctx.frame.callee);
    auto it = acct.storage.find(name);
    if (it == acct.storage.end()) throw Revert{RevertReason::Require, "no state variable '" + name + "'"};
    return it->second;
  }

  Value eval(Ctx& ctx, const Expr& e) {
    return std::visit(
        [&](const auto& n) -> Value {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, IntLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<N, BoolLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<N, AddrLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<N, NameRef>) {
            if (n.kind == NameKind::Local) {
              auto it = ctx.locals.find(n.name);
              if (it == ctx.locals.end()) throw Revert{RevertReason::Require, "local '" + n.name + "' is unset"};
              return it->second;
            }
            return read_state(ctx, n.name);
          } else if constexpr (std::is_same_v<N, Index>) {
            Address k = to_address(eval(ctx, *n.key));
            return map_get(as<UintMap>(read_state(ctx, n.map), "mapping"), k);
          } else if constexpr (std::is_same_v<N, Balance>) {
            const Account* a = vm.world_.find(to_address(eval(ctx, *n.account)));
            return a ? a->balance : uint256(0);
          } else if constexpr (std::is_same_v<N, MsgSender>) {
            return ctx.frame.caller;
          } else if constexpr (std::is_same_v<N, MsgValue>) {
            return ctx.frame.value;
          } else if constexpr (std::is_same_v<N, This>) {
            return ctx.frame.callee;
          } else if constexpr (std::is_same_v<N, Cast>) {
            return to_address(eval(ctx, *n.operand));
          } else if constexpr (std::is_same_v<N, Not>) {
            return !as<bool>(eval(ctx, *n.operand), "bool");
          } else if constexpr (std::is_same_v<N, Binary>) {
            if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
              bool l = as<bool>(eval(ctx, *n.lhs), "bool");
              if (n.op == BinaryOp::And && !l) return false;
              if (n.op == BinaryOp::Or && l) return true;
              return as<bool>(eval(ctx, *n.rhs), "bool");
            }
            Value l = eval(ctx, *n.lhs);
            Value r = eval(ctx, *n.rhs);
            switch (n.op) {
              case BinaryOp::Eq: return l == r;
              case BinaryOp::Ne: return l != r;
              case BinaryOp::Lt: return as<uint256>(l, "uint") < as<uint256>(r, "uint");
              case BinaryOp::Le: return as<uint256>(l, "uint") <= as<uint256>(r, "uint");
              case BinaryOp::Gt: return as<uint256>(l, "uint") > as<uint256>(r, "uint");
              case BinaryOp::Ge: return as<uint256>(l, "uint") >= as<uint256>(r, "uint");
              default: return arith(n.op, as<uint256>(l, "uint"), as<uint256>(r, "uint"));
            }
          } else {
            return call_expr(ctx, n, false).value_or(Value(uint256(0)));
          }
        },
        e.node);
  }

  // Returns the callee's return value. A reverted external call is swallowed
  // when `isolate` is set (call statements) and rethrown otherwise.
  std::optional<Value> call_expr(Ctx& ctx, const Call& c, bool isolate) {
    std::vector<Value> args;
    for (const auto& a : c.args) args.push_back(eval(ctx, a));
    if (!c.target) {
      const FunctionDef* f = ctx.code->find_function(c.function);
      if (!f) throw Revert{RevertReason::UnknownFunction, "no function '" + c.function + "'"};
      if (f->params.size() != args.size()) throw Revert{RevertReason::UnknownFunction, "arity mismatch"};
      Ctx inner{ctx.frame, ctx.code, {}};
      for (std::size_t i = 0; i < args.size(); ++i) inner.locals[f->params[i].name] = args[i];
      std::optional<Value> ret;
      exec_block(inner, f->body, ret);
      return ret;
    }
    Address target = to_address(eval(ctx, **c.target));
    uint256 value = c.value ? as<uint256>(eval(ctx, **c.value), "uint") : uint256(0);
    CallResult r = invoke(ctx.frame.callee, target, c.function, args, value, ctx.frame.depth + 1);
    if (!r.success) {
      if (isolate) return std::nullopt;
      throw Revert{*r.reason, "sub-call to " + c.function + " reverted: " + r.message};
    }
    return r.returned;
  }

  // ---- statements ---------------------------------------------------------

  enum class Flow { Next, Returned };

  Flow exec_block(Ctx& ctx, const Block& b, std::optional<Value>& ret) {
    for (const auto& s : b) {
      if (exec_stmt(ctx, s, ret) == Flow::Returned) return Flow::Returned;
    }
    return Flow::Next;
  }

  Flow exec_stmt(Ctx& ctx, const Stmt& s, std::optional<Value>& ret) {
    if (++vm.statements_ > vm.options_.statement_budget) {
      throw Revert{RevertReason::StatementBudget, "statement budget exhausted"};
    }
    return std::visit(
        [&](const auto& n) -> Flow {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Require>) {
            if (!as<bool>(eval(ctx, n.condition), "bool")) {
              throw Revert{RevertReason::Require, n.message.value_or("require failed")};
            }
          } else if constexpr (std::is_same_v<N, Assign>) {
            Value v = eval(ctx, n.value);
            if (n.kind == NameKind::Local) {
              ctx.locals[n.target] = std::move(v);
            } else if (n.key) {
              Address k = to_address(eval(ctx, *n.key));
              as<uint256>(v, "uint");
              write_state(ctx.frame.callee, n.target, k, std::move(v));
            } else {
              write_state(ctx.frame.callee, n.target, std::nullopt, std::move(v));
            }
          } else if constexpr (std::is_same_v<N, LocalDecl>) {
            ctx.locals[n.name] = n.init ? eval(ctx, *n.init) : default_value(n.type);
          } else if constexpr (std::is_same_v<N, If>) {
            const Block& branch = as<bool>(eval(ctx, n.condition), "bool") ? *n.then_branch : *n.else_branch;
            return exec_block(ctx, branch, ret);
          } else if constexpr (std::is_same_v<N, Send>) {
            Address to = to_address(eval(ctx, n.to));
            uint256 amount = as<uint256>(eval(ctx, n.amount), "uint");
            invoke(ctx.frame.callee, to, "", {}, amount, ctx.frame.depth + 1);
          } else if constexpr (std::is_same_v<N, CallStmt>) {
            call_expr(ctx, std::get<Call>(n.call.node), true);
          } else {
            if (n.value) ret = eval(ctx, *n.value);
            return Flow::Returned;
          }
          return Flow::Next;
        },
        s.node);
  }

  // ---- frames -------------------------------------------------------------

  CallResult invoke(const Address& caller, const Address& callee, const std::string& function,
                    const std::vector<Value>& args, const uint256& value, std::size_t depth) {
    if (depth > vm.options_.max_call_depth) {
      emit(RevertEvent{RevertReason::OutOfDepth, "call depth " + std::to_string(depth) + " exceeds limit", depth});
      return CallResult{false, RevertReason::OutOfDepth, "call depth exceeded", std::nullopt};
    }
    CallFrame frame{caller, callee, function.empty() ? "fallback" : function, value, depth};
    emit(CallEnter{frame});
    const std::size_t mark = journal.size();
    try {
      move_value(caller, callee, value);
      const Account& acct = vm.world_.accounts.at(callee);
      std::optional<Value> ret;
      if (!acct.is_contract()) {
        if (!function.empty()) throw Revert{RevertReason::NotAContract, callee.hex() + " has no code"};
      } else {
        std::shared_ptr<const ContractDef> code = acct.code;
        const FunctionDef* f = nullptr;
        if (function.empty()) {
          if (!code->fallback) throw Revert{RevertReason::NoFallback, code->name + " has no fallback"};
          f = &*code->fallback;
        } else {
          f = code->find_function(function);
          if (!f || !f->externally_callable()) {
            throw Revert{RevertReason::UnknownFunction, code->name + " has no public function '" + function + "'"};
          }
        }
        if (value > 0 && !f->payable) throw Revert{RevertReason::NotPayable, f->name + " is not payable"};
        if (f->params.size() != args.size()) {
          throw Revert{RevertReason::UnknownFunction, f->name + " expects " + std::to_string(f->params.size()) +
                                                          " argument(s)"};
        }
        Ctx ctx{frame, code.get(), {}};
        for (std::size_t i = 0; i < args.size(); ++i) ctx.locals[f->params[i].name] = args[i];
        exec_block(ctx, f->body, ret);
      }
      emit(CallExit{frame, true, std::nullopt});
      return CallResult{true, std::nullopt, "", std::move(ret)};
    } catch (const Revert& r) {
      rollback(mark);
      emit(RevertEvent{r.reason, r.message, depth});
      emit(CallExit{frame, false, r.reason});
      if (r.reason == RevertReason::StatementBudget) throw;
      return CallResult{false, r.reason, r.message, std::nullopt};
    }
  }
};

Vm::Vm(VmOptions options) : options_(options) {}

void Vm::set_observer(std::function<void(const TraceEvent&, const World&)> observer) {
  observer_ = std::move(observer);
}

void Vm::add_wallet(const Address& address, const uint256& balance, std::string label) {
  Account a;
  a.address = address;
  a.balance = balance;
  a.label = std::move(label);
  world_.accounts[address] = std::move(a);
}

Address Vm::deploy(const Address& deployer, std::shared_ptr<const ContractDef> def, const std::vector<Value>& args,
                   const uint256& endowment, std::string label) {
  if (!def || def->is_interface) throw DeployError("cannot deploy an interface");
  if (!world_.find(deployer)) throw DeployError("unknown deployer " + deployer.hex());
  const World before = world_;
  Address addr;
  do {
    addr = Address::from_index(world_.next_deploy_index++);
  } while (world_.accounts.count(addr));

  Account acct;
  acct.address = addr;
  acct.label = std::move(label);
  acct.code = def;
  for (const auto& v : def->state_vars) acct.storage[v.name] = default_value(v.type);
  world_.accounts[addr] = std::move(acct);

  Impl impl(*this);
  CallFrame frame{deployer, addr, "constructor", endowment, 0};
  impl.emit(CallEnter{frame});
  try {
    Impl::Ctx ctx{frame, def.get(), {}};
    for (const auto& v : def->state_vars) {
      if (v.init) world_.accounts.at(addr).storage.at(v.name) = impl.eval(ctx, *v.init);
    }
    impl.move_value(deployer, addr, endowment);
    if (def->constructor) {
      const auto& c = *def->constructor;
      if (c.params.size() != args.size()) {
        throw Impl::Revert{RevertReason::UnknownFunction,
                           "constructor expects " + std::to_string(c.params.size()) + " argument(s)"};
      }
      for (std::size_t i = 0; i < args.size(); ++i) ctx.locals[c.params[i].name] = args[i];
      std::optional<Value> ret;
      impl.exec_block(ctx, c.body, ret);
    } else if (!args.empty()) {
      throw Impl::Revert{RevertReason::UnknownFunction, def->name + " has no constructor"};
    }
  } catch (const Impl::Revert& r) {
    world_ = before;
    impl.emit(RevertEvent{r.reason, r.message, 0});
    impl.emit(CallExit{frame, false, r.reason});
    throw DeployError("deploying " + def->name + " failed: " + std::string(to_string(r.reason)) + ": " + r.message);
  }
  impl.emit(CallExit{frame, true, std::nullopt});
  return addr;
}

CallResult Vm::call(const Address& from, const Address& to, const std::string& function,
                    const std::vector<Value>& args, const uint256& value) {
  Impl impl(*this);
  try {
    return impl.invoke(from, to, function, args, value, 0);
  } catch (const Impl::Revert& r) {
    return CallResult{false, r.reason, r.message, std::nullopt};
  }
}

std::vector<Transfer> committed_transfers(std::span<const TraceEvent> trace) {
  std::vector<std::vector<Transfer>> stack(1);
  for (const auto& e : trace) {
    if (std::holds_alternative<CallEnter>(e)) {
      stack.emplace_back();
    } else if (const auto* t = std::get_if<Transfer>(&e)) {
      stack.back().push_back(*t);
    } else if (const auto* x = std::get_if<CallExit>(&e)) {
      if (stack.size() < 2) continue;
      std::vector<Transfer> done = std::move(stack.back());
      stack.pop_back();
      if (x->success) stack.back().insert(stack.back().end(), done.begin(), done.end());
    }
  }
  // frames still open at the end of a partial trace are reported as they stand
  for (std::size_t i = stack.size(); i-- > 1;) {
    stack[i - 1].insert(stack[i - 1].end(), stack[i].begin(), stack[i].end());
  }
  return stack.front();
}

uint256 victim_loss(std::span<const TraceEvent> trace, const std::set<Address>& victims) {
  std::map<Address, uint256> paid_in;
  std::map<Address, uint256> paid_out;
  for (const auto& t : committed_transfers(trace)) {
    const bool from_victim = victims.count(t.from) > 0;
    const bool to_victim = victims.count(t.to) > 0;
    if (from_victim && !to_victim) paid_out[t.to] += t.amount;
    if (to_victim && !from_victim) paid_in[t.from] += t.amount;
  }
  uint256 loss = 0;
  for (const auto& [party, out] : paid_out) {
    auto it = paid_in.find(party);
    uint256 in = it == paid_in.end() ? uint256(0) : it->second;
    if (out > in) loss += out - in;
  }
  return loss;
}

}  // namespace actorforge::seq
