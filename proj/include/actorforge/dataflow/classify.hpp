// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/dsl/ast.hpp"
#include "actorforge/token.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace actorforge::dataflow {

/// Tokens consumed per input port and produced per output port by one
/// firing, both in port declaration order.
struct RateVector {
  std::vector<std::uint64_t> consumption;
  std::vector<std::uint64_t> production;

  /// "(1;1)", or "(1,0;2)" with several ports.
  std::string str() const;
  bool operator==(const RateVector&) const = default;
};

enum class ActorClass { Static, CycloStatic, Dynamic };
std::string_view to_string(ActorClass c);

/// Static: one vector. CycloStatic: the repeating sequence, minimal period.
/// Dynamic: empty.
struct RateSignature {
  std::vector<RateVector> sequence;
  std::size_t period() const noexcept { return sequence.size(); }
};

struct Classification {
  ActorClass kind = ActorClass::Dynamic;
  RateSignature signature;
  std::string reason;  // why Dynamic, when it is

  /// "Static (1;1)", "CycloStatic period=2 [(2;1), (1;1)]", "Dynamic".
  std::string str() const;
};

Classification classify_actor(const dsl::ActorDecl& decl);

/// Rate vector of action `action` at cyclic phase `phase`.
RateVector action_rates(const dsl::ActorDecl& decl, std::size_t action, std::size_t phase = 0);

using InputScript = std::vector<std::pair<std::string, TokenValue>>;

/// JSON array of token descriptors, each with a "port" member:
/// [{"port":"in","uint":"3"}, {"port":"requests","sender":"0x..","value":"1"}].
/// Throws std::invalid_argument on malformed input.
InputScript parse_input_script(const nlohmann::json& j);

/// Runs `decl` alone on `script` for up to `n_firings` firings and returns the
/// observed vector of each firing. Stops early once nothing is fireable.
std::vector<RateVector> simulate_rates(const dsl::ActorDecl& decl, const InputScript& script, std::size_t n_firings);

}  // namespace actorforge::dataflow
