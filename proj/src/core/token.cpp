// SPDX-License-Identifier: Apache-2.0
#include "actorforge/token.hpp"

#include <stdexcept>

namespace actorforge {

uint256 carried_value(const TokenValue& t) {
  if (auto* m = std::get_if<MsgToken>(&t)) return m->value;
  return 0;
}

std::string describe(const TokenValue& t) {
  struct Visitor {
    std::string operator()(const uint256& u) const { return to_decimal(u); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Address& a) const { return a.hex(); }
    std::string operator()(const MsgToken& m) const {
      return "msg(" + m.sender.hex() + ", " + to_decimal(m.value) + ")";
    }
  };
  return std::visit(Visitor{}, t);
}

nlohmann::ordered_json to_json(const TokenValue& t) {
  nlohmann::ordered_json j;
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, uint256>) {
          j["uint"] = to_decimal(v);
        } else if constexpr (std::is_same_v<V, bool>) {
          j["bool"] = v;
        } else if constexpr (std::is_same_v<V, Address>) {
          j["address"] = v.hex();
        } else {
          j["sender"] = v.sender.hex();
          j["value"] = to_decimal(v.value);
        }
      },
      t);
  return j;
}

namespace {

uint256 amount_from_json(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return uint256(j.get<std::uint64_t>());
  if (j.is_string()) {
    if (auto v = parse_decimal(j.get<std::string>())) return *v;
  }
  throw std::invalid_argument("expected a decimal wei string, found " + j.dump());
}

Address address_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (auto a = Address::parse(j.get<std::string>())) return *a;
  }
  throw std::invalid_argument("expected a 0x-hex address, found " + j.dump());
}

}  // namespace

TokenValue token_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("token descriptor must be an object: " + j.dump());
  if (j.contains("uint")) return amount_from_json(j.at("uint"));
  if (j.contains("bool")) {
    if (!j.at("bool").is_boolean()) throw std::invalid_argument("'bool' must be true or false");
    return j.at("bool").get<bool>();
  }
  if (j.contains("address")) return address_from_json(j.at("address"));
  if (j.contains("value")) {
    MsgToken m;
    m.sender = j.contains("sender") ? address_from_json(j.at("sender")) : Address{};
    m.value = amount_from_json(j.at("value"));
    return m;
  }
  throw std::invalid_argument("unrecognized token descriptor: " + j.dump());
}

}  // namespace actorforge
