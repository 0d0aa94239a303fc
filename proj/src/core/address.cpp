// SPDX-License-Identifier: Apache-2.0
#include "actorforge/address.hpp"

namespace actorforge {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Address Address::from_index(std::uint64_t n) {
  Address a;
  for (std::size_t i = 0; i < 8; ++i) {
    a.bytes_[kSize - 1 - i] = static_cast<std::uint8_t>(n >> (8 * i));
  }
  return a;
}

std::optional<Address> Address::parse(std::string_view text) {
  if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) return std::nullopt;
  std::string_view digits = text.substr(2);
  if (digits.size() > 2 * kSize) return std::nullopt;
  std::string padded(2 * kSize - digits.size(), '0');
  padded.append(digits);
  Address a;
  for (std::size_t i = 0; i < kSize; ++i) {
    const int hi = hex_digit(padded[2 * i]);
    const int lo = hex_digit(padded[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    a.bytes_[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return a;
}

std::string Address::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "0x";
  out.reserve(2 + 2 * kSize);
  for (auto b : bytes_) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

bool Address::is_zero() const noexcept {
  for (auto b : bytes_) {
    if (b != 0) return false;
  }
  return true;
}

}  // namespace actorforge
