#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gacfg/pbo.hpp"

namespace gacfg {

namespace {

int dummy_count(int dimension, double fraction) {
  // Guard against products such as 0.9 * 10 landing just above an integer.
  const double raw = fraction * dimension;
  const double nearest = std::round(raw);
  const double count = std::abs(raw - nearest) < 1e-9 ? nearest : std::ceil(raw);
  return static_cast<int>(count);
}

void validate_layers(const WModelLayers& layers, int dimension) {
  if (dimension < 1) throw std::invalid_argument("W-model dimension must be positive");
  if (!(layers.dummy_fraction > 0.0 && layers.dummy_fraction <= 1.0))
    throw std::invalid_argument("dummy fraction must lie in (0, 1]");
  if (layers.neutrality_block < 1) throw std::invalid_argument("neutrality block must be positive");
  if (layers.epistasis_block < 1) throw std::invalid_argument("epistasis block must be positive");
  const int kept = dummy_count(dimension, layers.dummy_fraction);
  if (layers.neutrality_block > kept)
    throw std::invalid_argument("neutrality block " + std::to_string(layers.neutrality_block) +
                                " does not fit " + std::to_string(kept) + " positions");
  const int voted = kept / layers.neutrality_block;
  if (layers.epistasis_block > voted)
    throw std::invalid_argument("epistasis block " + std::to_string(layers.epistasis_block) +
                                " does not fit " + std::to_string(voted) + " positions");
}

class WModelFunction final : public FitnessFunction {
 public:
  WModelFunction(const WModelLayers& layers, FitnessPtr base, int dimension, std::uint64_t seed)
      : layers_(layers), base_(std::move(base)), dimension_(dimension) {
    if (layers_.dummy_fraction < 1.0)
      positions_ = dummy_positions(dimension, layers_.dummy_fraction, seed);
    reduced_ = wmodel_reduced_length(layers_, dimension);
    if (layers_.ruggedness == Ruggedness::r3) table_ = ruggedness3_table(reduced_);
  }

  double evaluate(std::span<const std::uint8_t> x) const override {
    std::vector<std::uint8_t> work;
    if (!positions_.empty()) {
      work.reserve(positions_.size());
      for (int p : positions_) work.push_back(x[static_cast<std::size_t>(p)]);
    } else {
      work.assign(x.begin(), x.end());
    }
    if (layers_.neutrality_block > 1) work = neutrality(work, layers_.neutrality_block);
    if (layers_.epistasis_block > 1) work = epistasis(work, layers_.epistasis_block);
    const double y = base_->evaluate(work);
    switch (layers_.ruggedness) {
      case Ruggedness::none:
        return y;
      case Ruggedness::r1:
        return ruggedness1(y, reduced_);
      case Ruggedness::r2:
        return ruggedness2(y, reduced_);
      case Ruggedness::r3: {
        const auto idx = static_cast<std::size_t>(std::clamp(y, 0.0, static_cast<double>(reduced_)));
        return table_[idx];
      }
    }
    return y;
  }

 private:
  WModelLayers layers_;
  FitnessPtr base_;
  int dimension_;
  int reduced_ = 0;
  std::vector<int> positions_;
  std::vector<double> table_;
};

}  // namespace

std::vector<int> dummy_positions(int dimension, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("dummy fraction must lie in (0, 1]");
  const int count = dummy_count(dimension, fraction);
  std::vector<int> all(static_cast<std::size_t>(dimension));
  std::iota(all.begin(), all.end(), 0);
  Rng rng(derive_seed({seed, 0x64756d6d79ULL /* "dummy" */}));
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(dimension - i));
    std::swap(all[static_cast<std::size_t>(i)], all[j]);
  }
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<std::uint8_t> neutrality(std::span<const std::uint8_t> x, int block) {
  if (block < 1) throw std::invalid_argument("neutrality block must be positive");
  const std::size_t blocks = x.size() / static_cast<std::size_t>(block);
  std::vector<std::uint8_t> out(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    int ones = 0;
    for (int j = 0; j < block; ++j) ones += x[b * static_cast<std::size_t>(block) + static_cast<std::size_t>(j)];
    out[b] = 2 * ones >= block ? 1 : 0;
  }
  return out;
}

std::vector<std::uint8_t> epistasis(std::span<const std::uint8_t> x, int block) {
  if (block < 1) throw std::invalid_argument("epistasis block must be positive");
  const auto n = static_cast<int>(x.size());
  std::vector<std::uint8_t> out;
  out.reserve(x.size());
  // Output bit i of a block of width v is the XOR of every input bit j of
  // the block with (v - i - 1) != (v - j) mod 4. For v = 4 that drops
  // exactly input bit (i + 1) mod 4, which makes the map a bijection.
  auto remap = [&](int start, int v) {
    for (int i = 0; i < v; ++i) {
      int acc = -1;
      for (int j = 0; j < v; ++j) {
        if ((v - i - 1) == ((v - j) % 4)) continue;
        const int bit = x[static_cast<std::size_t>(start + j)];
        acc = acc < 0 ? bit : (acc != bit ? 1 : 0);
      }
      out.push_back(static_cast<std::uint8_t>(acc < 0 ? 0 : acc));
    }
  };
  int h = 0;
  while (h + block <= n) {
    remap(h, block);
    h += block;
  }
  if (h < n) remap(h, n - h);
  return out;
}

double ruggedness1(double y, int length) {
  const auto s = static_cast<double>(length);
  if (y == s) return std::ceil(y / 2.0) + 1.0;
  if (y < s && length % 2 == 0) return std::floor(y / 2.0) + 1.0;
  if (y < s) return std::ceil(y / 2.0) + 1.0;
  return y;
}

double ruggedness2(double y, int length) {
  const auto rounded = static_cast<int>(y + 0.5);
  if (rounded >= length) return y;
  const bool even_value = rounded % 2 == 0;
  const bool even_length = length % 2 == 0;
  if (even_value == even_length) return y + 1.0;
  return std::max(y - 1.0, 0.0);
}

std::vector<double> ruggedness3_table(int length) {
  std::vector<double> table(static_cast<std::size_t>(length) + 1, 0.0);
  for (int j = 1; j <= length / 5; ++j)
    for (int k = 0; k < 5; ++k)
      table[static_cast<std::size_t>(length - 5 * j + k)] = static_cast<double>(length - 5 * j + (4 - k));
  const int rest = length - length / 5 * 5;
  for (int k = 0; k < rest; ++k) table[static_cast<std::size_t>(k)] = static_cast<double>(rest - 1 - k);
  table[static_cast<std::size_t>(length)] = static_cast<double>(length);
  return table;
}

int wmodel_reduced_length(const WModelLayers& layers, int dimension) {
  validate_layers(layers, dimension);
  return dummy_count(dimension, layers.dummy_fraction) / layers.neutrality_block;
}

FitnessPtr apply_wmodel(const WModelLayers& layers, FitnessPtr base, int dimension,
                        std::uint64_t instance_seed) {
  if (!base) throw std::invalid_argument("W-model needs a base function");
  validate_layers(layers, dimension);
  return std::make_shared<WModelFunction>(layers, std::move(base), dimension, instance_seed);
}

}  // namespace gacfg
