// SPDX-License-Identifier: Apache-2.0
#include "actorforge/value.hpp"

namespace actorforge {

std::string describe(const Value& v) {
  struct Visitor {
    std::string operator()(const uint256& u) const { return to_decimal(u); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Address& a) const { return a.hex(); }
    std::string operator()(const UintMap& m) const {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, val] : m) {
        if (!first) out += ", ";
        first = false;
        out += k.hex() + ": " + to_decimal(val);
      }
      return out + "}";
    }
  };
  return std::visit(Visitor{}, v);
}

uint256 map_get(const UintMap& m, const Address& key) {
  auto it = m.find(key);
  return it == m.end() ? uint256(0) : it->second;
}

}  // namespace actorforge
