#include "gacfg/bitstring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gacfg {

double Rng::normal() {
  // 1 - u keeps the logarithm argument in (0, 1].
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

BitString BitString::from_string(std::string_view text) {
  BitString out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1')
      throw std::invalid_argument("bit string may only contain '0' and '1'");
    out.bits_[i] = text[i] == '1' ? 1 : 0;
  }
  return out;
}

BitString BitString::from_bits(std::vector<std::uint8_t> bits) {
  if (std::any_of(bits.begin(), bits.end(), [](auto b) { return b > 1; }))
    throw std::invalid_argument("bit values must be 0 or 1");
  BitString out;
  out.bits_ = std::move(bits);
  return out;
}

BitString BitString::random(std::size_t n, Rng& rng) {
  BitString out(n);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng();
    out.bits_[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
  }
  return out;
}

BitString BitString::from_code(std::uint64_t code, std::size_t n) {
  BitString out(n);
  for (std::size_t i = 0; i < n && i < 64; ++i) out.bits_[i] = (code >> i) & 1U;
  return out;
}

std::size_t BitString::count_ones() const noexcept {
  return static_cast<std::size_t>(std::accumulate(bits_.begin(), bits_.end(), std::size_t{0}));
}

std::size_t BitString::hamming_distance(const BitString& other) const {
  if (other.size() != size()) throw std::invalid_argument("hamming distance of unequal lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != other.bits_[i];
  return d;
}

std::string BitString::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

}  // namespace gacfg
