// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/dsl/ast.hpp"
#include "actorforge/dsl/network.hpp"
#include "actorforge/token.hpp"
#include "actorforge/value.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace actorforge::dataflow {

/// Raised when evaluating a guard or an action body fails (overflow,
/// division by zero, overdrawn native balance). A failed firing leaves the
/// network untouched.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// FIFO channel between one output port and one input port.
struct Buffer {
  std::string id;
  std::deque<TokenValue> tokens;
  std::optional<std::size_t> capacity;  // unbounded when empty
  std::optional<std::size_t> target;    // consuming instance, if connected

  bool has_room(std::size_t n) const { return !capacity || tokens.size() + n <= *capacity; }
  bool operator==(const Buffer&) const = default;
};

struct ActorInstance {
  std::string name;
  std::shared_ptr<const dsl::ActorDecl> decl;
  Address address;
  std::map<std::string, Value> state;  // exactly the declared state variables
  std::optional<std::string> fsm_state;
  uint256 native_balance;
  std::vector<std::size_t> phases;  // per action, position in its cyclic rate

  bool operator==(const ActorInstance& o) const {
    return name == o.name && address == o.address && state == o.state && fsm_state == o.fsm_state &&
           native_balance == o.native_balance && phases == o.phases;
  }
};

/// Fresh instance with declared initial state. Throws EvalError if an
/// initializer fails to evaluate.
ActorInstance instantiate(std::shared_ptr<const dsl::ActorDecl> decl, std::string name, Address address,
                          uint256 native_balance);

struct RuntimeOptions {
  /// Applied to every buffer without an explicit `capacity`.
  std::optional<std::size_t> buffer_capacity;
};

/// Runtime state of an actor network.
class Network {
 public:
  /// Instance i gets address from_index(i + 1), in declaration order.
  static Network from_decl(const dsl::NetworkDecl& decl, const RuntimeOptions& options = {});

  /// One instance of `decl` with every input port fed from `script`
  /// (port name, token) and every output port draining into an open buffer.
  static Network isolated(dsl::ActorDecl decl, std::span<const std::pair<std::string, TokenValue>> script,
                          uint256 native_balance = 0);

  std::vector<ActorInstance> instances;
  std::vector<Buffer> buffers;
  std::vector<std::map<std::string, std::size_t>> input_buffers;   // per instance: port -> buffer
  std::vector<std::map<std::string, std::size_t>> output_buffers;  // per instance: port -> buffer
  std::set<std::string> victims;

  std::optional<std::size_t> find_instance(std::string_view name) const;

  /// Sum of native balances plus value carried by tokens in flight.
  uint256 total_value() const;

  bool operator==(const Network&) const = default;

 private:
  void add_instance(ActorInstance inst);
  std::size_t add_buffer(std::string id, std::optional<std::size_t> capacity, std::optional<std::size_t> target);
};

/// One atomic action execution.
struct FiringRecord {
  std::size_t step = 0;
  std::string actor;
  std::string action;
  std::vector<std::pair<std::string, TokenValue>> consumed;  // (buffer id, token)
  std::vector<std::pair<std::string, TokenValue>> produced;  // (buffer id, token), emission order
  std::uint64_t state_before = 0;
  std::uint64_t state_after = 0;

  bool operator==(const FiringRecord&) const = default;
};

/// Result of evaluating an action against a state snapshot, without touching
/// any buffer.
struct FiringOutcome {
  ActorInstance after;
  std::vector<std::pair<std::string, TokenValue>> produced;  // (port, token)
};

/// Tokens each consume clause of `action` would take right now.
std::vector<std::vector<TokenValue>> peek_inputs(const Network& net, std::size_t instance, std::size_t action);

/// Pure evaluation: consumes `inputs` (one vector per consume clause), runs
/// the body on a private copy of `before` and returns the committed state and
/// the buffered emissions. Guards are not re-checked.
FiringOutcome evaluate_firing(const ActorInstance& before, std::size_t action,
                              std::span<const std::vector<TokenValue>> inputs);

/// True iff every consumed port holds enough tokens, every output buffer has
/// room, the schedule allows the action and all guards hold. A guard that
/// fails to evaluate makes the action non-fireable; its message is stored in
/// `error` when given.
bool can_fire(const Network& net, std::size_t instance, std::size_t action, std::string* error = nullptr);

/// Consume, evaluate, commit, then release emissions. Throws EvalError
/// (network unchanged) if the action is not fireable or the body fails.
FiringRecord fire(Network& net, std::size_t instance, std::size_t action, std::size_t step = 0);

/// 64-bit FNV-1a over the canonical serialization of an instance's state.
std::uint64_t state_hash(const ActorInstance& inst);
std::string canonical_state(const ActorInstance& inst);
std::string hex_digest(std::uint64_t h);

enum class SchedulerPolicy {
  RoundRobin,     // resume scanning after the last instance that fired
  FirstFireable,  // always scan from the first instance
};

class Scheduler {
 public:
  explicit Scheduler(SchedulerPolicy policy = SchedulerPolicy::RoundRobin) : policy_(policy) {}

  SchedulerPolicy policy() const noexcept { return policy_; }
  std::size_t steps() const noexcept { return steps_; }

 private:
  friend std::optional<FiringRecord> step_network(Network&, Scheduler&);
  SchedulerPolicy policy_;
  std::size_t cursor_ = 0;
  std::size_t steps_ = 0;
};

/// Fires at most one action. Instances are scanned per the policy, actions in
/// declaration order. Returns nullopt iff nothing is fireable.
std::optional<FiringRecord> step_network(Network& net, Scheduler& scheduler);

bool is_quiescent(const Network& net);

enum class Termination { Quiescent, StepLimitExceeded };

struct RunResult {
  std::vector<FiringRecord> trace;
  Termination termination = Termination::Quiescent;
};

RunResult run_until_quiescent(Network& net, SchedulerPolicy policy, std::size_t max_steps);

/// {"step","actor","action","consumed","produced","state_before","state_after"}
nlohmann::ordered_json to_json(const FiringRecord& r);
void write_jsonl(std::ostream& os, std::span<const FiringRecord> trace);

/// Value sent by `victims` to each other party beyond what that party sent
/// them, summed over parties. Token transfers are read from the trace; the
/// recipient of a produced token is the instance consuming its buffer.
uint256 victim_loss(const Network& net, std::span<const FiringRecord> trace, const std::set<std::string>& victims);

}  // namespace actorforge::dataflow
