#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gacfg/rng.hpp"

namespace gacfg {

/// Fixed-length binary solution vector. Every element is 0 or 1.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}

  /// Parses a string of '0'/'1' characters; throws std::invalid_argument otherwise.
  static BitString from_string(std::string_view text);
  static BitString from_bits(std::vector<std::uint8_t> bits);
  static BitString random(std::size_t n, Rng& rng);
  /// The bit string whose i-th bit is bit i of `code` (little-endian).
  static BitString from_code(std::uint64_t code, std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
  void set(std::size_t i, bool value) noexcept { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) noexcept { bits_[i] ^= 1; }

  std::size_t count_ones() const noexcept;
  std::size_t hamming_distance(const BitString& other) const;

  std::span<const std::uint8_t> view() const noexcept { return bits_; }
  std::span<std::uint8_t> mutable_view() noexcept { return bits_; }

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace gacfg
