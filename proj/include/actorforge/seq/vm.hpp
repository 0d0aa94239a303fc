// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/seq/ast.hpp"
#include "actorforge/value.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace actorforge::seq {

/// An external wallet when `code` is empty, a contract otherwise.
struct Account {
  Address address;
  uint256 balance;
  std::string label;
  std::shared_ptr<const ContractDef> code;
  std::map<std::string, Value> storage;  // exactly the declared state variables

  bool is_contract() const noexcept { return code != nullptr; }
  bool operator==(const Account& o) const {
    return address == o.address && balance == o.balance && label == o.label && storage == o.storage &&
           (code == o.code || (code && o.code && *code == *o.code));
  }
};

struct World {
  std::map<Address, Account> accounts;
  std::uint64_t next_deploy_index = 1;

  const Account* find(const Address& a) const;
  uint256 total_balance() const;
  bool operator==(const World&) const = default;
};

enum class RevertReason {
  Require,
  OutOfDepth,
  InsufficientBalance,
  Overflow,
  Underflow,
  DivisionByZero,
  NotPayable,
  UnknownFunction,
  NoFallback,
  NotAContract,
  StatementBudget,
};
std::string_view to_string(RevertReason r);

struct CallFrame {
  Address caller;
  Address callee;
  std::string function;  // "fallback" when the fallback runs
  uint256 value;
  std::size_t depth = 0;

  bool operator==(const CallFrame&) const = default;
};

struct CallEnter {
  CallFrame frame;
  bool operator==(const CallEnter&) const = default;
};
struct CallExit {
  CallFrame frame;
  bool success = true;
  std::optional<RevertReason> reason;
  bool operator==(const CallExit&) const = default;
};
struct Transfer {
  Address from;
  Address to;
  uint256 amount;
  bool operator==(const Transfer&) const = default;
};
struct StorageWrite {
  Address address;
  std::string var;
  std::optional<Address> key;
  Value old_value;
  Value new_value;
  bool operator==(const StorageWrite&) const = default;
};
struct RevertEvent {
  RevertReason reason = RevertReason::Require;
  std::string message;
  std::size_t depth = 0;
  bool operator==(const RevertEvent&) const = default;
};

using TraceEvent = std::variant<CallEnter, CallExit, Transfer, StorageWrite, RevertEvent>;

nlohmann::ordered_json to_json(const TraceEvent& e);

struct CallResult {
  bool success = true;
  std::optional<RevertReason> reason;
  std::string message;
  std::optional<Value> returned;
};

struct VmOptions {
  std::size_t max_call_depth = 1024;
  std::uint64_t statement_budget = 1'000'000;
};

class DeployError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sequential call interpreter. Every call opens a frame; a reverted frame
/// rolls back exactly its own storage writes and balance moves (and those of
/// its sub-frames). A sub-call that reverts inside `send` or a call statement
/// does not revert the caller; a sub-call used as a value does.
class Vm {
 public:
  explicit Vm(VmOptions options = {});

  const World& world() const noexcept { return world_; }
  const std::vector<TraceEvent>& trace() const noexcept { return trace_; }
  const VmOptions& options() const noexcept { return options_; }
  std::uint64_t statements_executed() const noexcept { return statements_; }

  /// Called after every trace event is appended.
  void set_observer(std::function<void(const TraceEvent&, const World&)> observer);

  void add_wallet(const Address& address, const uint256& balance, std::string label = {});

  /// Deploys at the next free counter address (0x..01, 0x..02, ...), runs the
  /// constructor and moves `endowment` from the deployer without running any
  /// fallback. Throws DeployError (world unchanged) on failure.
  Address deploy(const Address& deployer, std::shared_ptr<const ContractDef> def, const std::vector<Value>& args,
                 const uint256& endowment, std::string label = {});

  /// Top-level transaction at depth 0. `function` empty means a plain value
  /// transfer (fallback on contracts).
  CallResult call(const Address& from, const Address& to, const std::string& function, const std::vector<Value>& args,
                  const uint256& value);

 private:
  struct Impl;
  VmOptions options_;
  World world_;
  std::vector<TraceEvent> trace_;
  std::uint64_t statements_ = 0;
  std::function<void(const TraceEvent&, const World&)> observer_;

  friend struct Impl;
};

/// Transfer events that survive rollback: drops everything emitted inside a
/// frame whose CallExit reports failure.
std::vector<Transfer> committed_transfers(std::span<const TraceEvent> trace);

/// Sum over non-victim counterparties X of max(0, sent(victims -> X) -
/// sent(X -> victims)), over committed transfers.
uint256 victim_loss(std::span<const TraceEvent> trace, const std::set<Address>& victims);

}  // namespace actorforge::seq
