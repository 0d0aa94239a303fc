// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace actorforge {

/// 20-byte account identifier, rendered as lowercase 0x-hex.
class Address {
 public:
  static constexpr std::size_t kSize = 20;

  constexpr Address() = default;

  /// Big-endian embedding of a counter: from_index(1) == 0x00..01.
  static Address from_index(std::uint64_t n);

  /// Accepts "0x" followed by 1..40 hex digits (left-padded with zeros).
  static std::optional<Address> parse(std::string_view text);

  std::string hex() const;
  bool is_zero() const noexcept;

  auto operator<=>(const Address&) const = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

}  // namespace actorforge
