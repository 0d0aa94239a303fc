// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/address.hpp"
#include "actorforge/numeric.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <variant>

namespace actorforge {

/// Value-bearing request/transfer token: the dataflow counterpart of
/// msg.sender / msg.value.
struct MsgToken {
  Address sender;
  uint256 value;
  bool operator==(const MsgToken&) const = default;
};

/// One token travelling on a buffer.
using TokenValue = std::variant<uint256, bool, Address, MsgToken>;

/// Native value carried by a token (non-zero only for MsgToken).
uint256 carried_value(const TokenValue& t);

std::string describe(const TokenValue& t);

/// {"uint":"5"} / {"bool":true} / {"address":"0x.."} / {"sender":"0x..","value":"1"}
nlohmann::ordered_json to_json(const TokenValue& t);

/// Inverse of to_json. Throws std::invalid_argument on malformed input.
TokenValue token_from_json(const nlohmann::json& j);

}  // namespace actorforge
