// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/address.hpp"
#include "actorforge/numeric.hpp"

#include <map>
#include <string>
#include <variant>

namespace actorforge {

/// map(address -> uint). Absent keys read as zero.
using UintMap = std::map<Address, uint256>;

/// Runtime value shared by the dataflow runtime and the sequential VM.
using Value = std::variant<uint256, bool, Address, UintMap>;

std::string describe(const Value& v);

/// Reads `m[key]` with the missing-key-is-zero rule.
uint256 map_get(const UintMap& m, const Address& key);

}  // namespace actorforge
