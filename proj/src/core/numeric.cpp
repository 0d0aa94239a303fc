// SPDX-License-Identifier: Apache-2.0
#include "actorforge/numeric.hpp"

#include <algorithm>

namespace actorforge {

namespace {

using uint512 = boost::multiprecision::uint512_t;

const uint256& max_uint256() {
  static const uint256 kMax = ~uint256(0);
  return kMax;
}

}  // namespace

const uint256& wei_per_ether() {
  static const uint256 kWei("1000000000000000000");
  return kWei;
}

std::string_view to_string(ArithFault fault) {
  switch (fault) {
    case ArithFault::Overflow: return "overflow";
    case ArithFault::Underflow: return "underflow";
    case ArithFault::DivisionByZero: return "division by zero";
  }
  return "?";
}

ArithmeticError::ArithmeticError(ArithFault fault)
    : std::runtime_error("arithmetic " + std::string(to_string(fault))), fault_(fault) {}

uint256 checked_add(const uint256& a, const uint256& b) {
  if (a > max_uint256() - b) throw ArithmeticError(ArithFault::Overflow);
  return a + b;
}

uint256 checked_sub(const uint256& a, const uint256& b) {
  if (b > a) throw ArithmeticError(ArithFault::Underflow);
  return a - b;
}

uint256 checked_mul(const uint256& a, const uint256& b) {
  const uint512 wide = uint512(a) * uint512(b);
  if (wide > uint512(max_uint256())) throw ArithmeticError(ArithFault::Overflow);
  return static_cast<uint256>(wide);
}

uint256 checked_div(const uint256& a, const uint256& b) {
  if (b == 0) throw ArithmeticError(ArithFault::DivisionByZero);
  return a / b;
}

uint256 checked_mod(const uint256& a, const uint256& b) {
  if (b == 0) throw ArithmeticError(ArithFault::DivisionByZero);
  return a % b;
}

std::string to_decimal(const uint256& v) { return v.str(); }

std::optional<uint256> parse_decimal(std::string_view text) {
  uint256 acc = 0;
  bool any = false;
  try {
    for (char c : text) {
      if (c == '_') continue;
      if (c < '0' || c > '9') return std::nullopt;
      acc = checked_add(checked_mul(acc, 10), uint256(c - '0'));
      any = true;
    }
  } catch (const ArithmeticError&) {
    return std::nullopt;
  }
  if (!any) return std::nullopt;
  return acc;
}

std::optional<uint256> parse_ether(std::string_view text) {
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  auto units = parse_decimal(whole);
  if (!units) return std::nullopt;
  try {
    uint256 wei = checked_mul(*units, wei_per_ether());
    if (dot == std::string_view::npos) return wei;
    std::string frac;
    for (char c : text.substr(dot + 1)) {
      if (c == '_') continue;
      if (c < '0' || c > '9') return std::nullopt;
      frac.push_back(c);
    }
    if (frac.empty() || frac.size() > 18) return std::nullopt;
    frac.append(18 - frac.size(), '0');
    return checked_add(wei, *parse_decimal(frac));
  } catch (const ArithmeticError&) {
    return std::nullopt;
  }
}

std::string format_ether_number(const uint256& wei) {
  const uint256 whole = wei / wei_per_ether();
  const uint256 rest = wei % wei_per_ether();
  std::string out = to_decimal(whole);
  if (rest != 0) {
    std::string frac = to_decimal(rest);
    frac.insert(0, 18 - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    out += "." + frac;
  }
  return out;
}

std::string format_ether(const uint256& wei) { return format_ether_number(wei) + " ether"; }

}  // namespace actorforge
