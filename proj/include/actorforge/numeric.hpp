// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace actorforge {

/// Unsigned 256-bit integer. Arithmetic on it wraps; use the checked_* helpers
/// wherever the value model forbids wrapping.
using uint256 = boost::multiprecision::uint256_t;

/// 10^18, the number of wei in one ether.
const uint256& wei_per_ether();

enum class ArithFault { Overflow, Underflow, DivisionByZero };

std::string_view to_string(ArithFault fault);

class ArithmeticError : public std::runtime_error {
 public:
  explicit ArithmeticError(ArithFault fault);
  ArithFault fault() const noexcept { return fault_; }

 private:
  ArithFault fault_;
};

uint256 checked_add(const uint256& a, const uint256& b);
uint256 checked_sub(const uint256& a, const uint256& b);
uint256 checked_mul(const uint256& a, const uint256& b);
uint256 checked_div(const uint256& a, const uint256& b);
uint256 checked_mod(const uint256& a, const uint256& b);

std::string to_decimal(const uint256& v);

/// Parses a plain decimal integer (digits and `_` separators). Returns nullopt
/// on empty input, foreign characters, or a value that does not fit 256 bits.
std::optional<uint256> parse_decimal(std::string_view text);

/// Parses "3", "0.5", "1_000.25" as an ether quantity and returns wei.
/// At most 18 fractional digits are accepted so the result is exact.
std::optional<uint256> parse_ether(std::string_view text);

/// Renders wei as an ether quantity without unit: 6000000000000000000 -> "6",
/// 500000000000000000 -> "0.5".
std::string format_ether_number(const uint256& wei);

/// format_ether_number(wei) + " ether".
std::string format_ether(const uint256& wei);

}  // namespace actorforge
