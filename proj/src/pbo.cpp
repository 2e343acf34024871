#include "gacfg/pbo.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gacfg {

namespace {

constexpr std::array<double, kProblemCount> kTargets = {
    100, 100, 5050, 50, 90, 33, 100, 51, 100, 100, 50, 90, 33,
    7,   51,  100,  100, 4.216, 98, 180, 260, 42, 9, 17.196, -0.297};

constexpr std::array<const char*, kProblemCount> kTitles = {
    "OneMax",
    "LeadingOnes",
    "Linear",
    "OneMax+Dummy1",
    "OneMax+Dummy2",
    "OneMax+Neutrality",
    "OneMax+Epistasis",
    "OneMax+Ruggedness1",
    "OneMax+Ruggedness2",
    "OneMax+Ruggedness3",
    "LeadingOnes+Dummy1",
    "LeadingOnes+Dummy2",
    "LeadingOnes+Neutrality",
    "LeadingOnes+Epistasis",
    "LeadingOnes+Ruggedness1",
    "LeadingOnes+Ruggedness2",
    "LeadingOnes+Ruggedness3",
    "LABS",
    "IsingRing",
    "IsingTorus",
    "IsingTriangular",
    "MIVS",
    "NQueens",
    "ConcatenatedTrap",
    "NKLandscapes"};

constexpr int kBruteForceLimit = 20;

int exact_sqrt(int n) {
  const auto r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? r : -1;
}

int require_square(int n, const char* what) {
  const int side = exact_sqrt(n);
  if (side < 0) throw std::invalid_argument(std::string(what) + " needs a perfect-square dimension, got " + std::to_string(n));
  return side;
}

class OneMax final : public FitnessFunction {
 public:
  double evaluate(std::span<const std::uint8_t> x) const override {
    return static_cast<double>(std::accumulate(x.begin(), x.end(), 0));
  }
};

class LeadingOnes final : public FitnessFunction {
 public:
  double evaluate(std::span<const std::uint8_t> x) const override {
    const auto it = std::find(x.begin(), x.end(), std::uint8_t{0});
    return static_cast<double>(it - x.begin());
  }
};

class HarmonicLinear final : public FitnessFunction {
 public:
  double evaluate(std::span<const std::uint8_t> x) const override {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += static_cast<double>(i + 1) * x[i];
    return sum;
  }
};

class Labs final : public FitnessFunction {
 public:
  double evaluate(std::span<const std::uint8_t> x) const override {
    const std::size_t n = x.size();
    long long energy = 0;
    for (std::size_t k = 1; k < n; ++k) {
      long long corr = 0;
      for (std::size_t i = 0; i + k < n; ++i) corr += (x[i] == x[i + k]) ? 1 : -1;
      energy += corr * corr;
    }
    if (energy == 0) return 0.0;
    return static_cast<double>(n * n) / (2.0 * static_cast<double>(energy));
  }
};

class IsingRing final : public FitnessFunction {
 public:
  double evaluate(std::span<const std::uint8_t> x) const override {
    const std::size_t n = x.size();
    int agree = 0;
    for (std::size_t i = 0; i < n; ++i) agree += x[i] == x[(i + 1) % n];
    return agree;
  }
};

// Square lattice with periodic boundary. Each site is compared with its
// neighbour below, to the right and (triangular variant) diagonally.
class IsingLattice final : public FitnessFunction {
 public:
  IsingLattice(int side, bool triangular) : side_(side), triangular_(triangular) {}

  double evaluate(std::span<const std::uint8_t> x) const override {
    const int L = side_;
    auto at = [&](int r, int c) { return x[static_cast<std::size_t>(((r + L) % L) * L + (c + L) % L)]; };
    int agree = 0;
    for (int r = 0; r < L; ++r) {
      for (int c = 0; c < L; ++c) {
        const auto v = at(r, c);
        agree += v == at(r + 1, c);
        agree += v == at(r, c + 1);
        if (triangular_) agree += v == at(r + 1, c + 1);
      }
    }
    return agree;
  }

 private:
  int side_;
  bool triangular_;
};

// Graph on the even part of the string: two paths of length n/2 (vertices
// 1..n/2 and n/2+1..n, 1-based) with diagonal edges i -- i+n/2+1 and
// i -- i+n/2-1.
class MaxIndependentSet final : public FitnessFunction {
 public:
  explicit MaxIndependentSet(int dimension) : even_(dimension - dimension % 2) {}

  double evaluate(std::span<const std::uint8_t> x) const override {
    std::vector<int> chosen;
    chosen.reserve(static_cast<std::size_t>(even_));
    for (int i = 0; i < even_; ++i)
      if (x[static_cast<std::size_t>(i)]) chosen.push_back(i + 1);
    long long edges = 0;
    for (std::size_t a = 0; a < chosen.size(); ++a)
      for (std::size_t b = a + 1; b < chosen.size(); ++b) edges += is_edge(chosen[a], chosen[b]);
    return static_cast<double>(chosen.size()) - static_cast<double>(even_) * static_cast<double>(edges);
  }

 private:
  bool is_edge(int i, int j) const {
    const int half = even_ / 2;
    if (i != half && j == i + 1) return true;
    if (i <= half - 1 && j == i + half + 1) return true;
    if (i <= half && i >= 2 && j == i + half - 1) return true;
    return false;
  }

  int even_;
};

// Queens on an N x N board, penalised by N per surplus queen on every row,
// column and diagonal.
class NQueens final : public FitnessFunction {
 public:
  explicit NQueens(int side) : side_(side) {}

  double evaluate(std::span<const std::uint8_t> x) const override {
    const int N = side_;
    auto at = [&](int r, int c) { return static_cast<int>(x[static_cast<std::size_t>(r * N + c)]); };
    const int queens = std::accumulate(x.begin(), x.end(), 0);
    double penalty = 0.0;
    for (int r = 0; r < N; ++r) {
      int s = 0;
      for (int c = 0; c < N; ++c) s += at(r, c);
      penalty += std::max(0, s - 1);
    }
    for (int c = 0; c < N; ++c) {
      int s = 0;
      for (int r = 0; r < N; ++r) s += at(r, c);
      penalty += std::max(0, s - 1);
    }
    for (int k = 2 - N; k <= N - 2; ++k) {
      int s = 0;
      for (int r = 0; r < N; ++r)
        if (r + k >= 0 && r + k < N) s += at(r, r + k);
      penalty += std::max(0, s - 1);
    }
    for (int l = 1; l <= 2 * N - 3; ++l) {
      int s = 0;
      for (int r = 0; r < N; ++r)
        if (l - r >= 0 && l - r < N) s += at(r, l - r);
      penalty += std::max(0, s - 1);
    }
    return queens - static_cast<double>(N) * penalty;
  }

 private:
  int side_;
};

class ConcatenatedTrap final : public FitnessFunction {
 public:
  explicit ConcatenatedTrap(int block) : block_(block) {}

  double evaluate(std::span<const std::uint8_t> x) const override {
    const auto n = static_cast<int>(x.size());
    double result = 0.0;
    auto trap = [&](int start, int width) {
      int ones = 0;
      for (int j = start; j < start + width; ++j) ones += x[static_cast<std::size_t>(j)];
      if (ones == width) return 1.0;
      return static_cast<double>(width - 1 - ones) / static_cast<double>(width);
    };
    int start = 0;
    for (; start + block_ <= n; start += block_) result += trap(start, block_);
    if (start < n) result += trap(start, n - start);
    return result;
  }

 private:
  int block_;
};

class NKLandscape final : public FitnessFunction {
 public:
  NKLandscape(int n, int k, std::uint64_t seed) : k_(k), neighbours_(static_cast<std::size_t>(n)) {
    Rng rng(derive_seed({seed, 0x6e6bULL /* "nk" */}));
    const std::size_t entries = std::size_t{1} << (k + 1);
    tables_.resize(static_cast<std::size_t>(n) * entries);
    for (int i = 0; i < n; ++i) {
      // k distinct neighbours other than i, by partial Fisher-Yates.
      std::vector<int> pool;
      pool.reserve(static_cast<std::size_t>(n - 1));
      for (int j = 0; j < n; ++j)
        if (j != i) pool.push_back(j);
      for (int j = 0; j < k; ++j) {
        const auto pick = static_cast<std::size_t>(j) + rng.below(pool.size() - static_cast<std::size_t>(j));
        std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
      }
      neighbours_[static_cast<std::size_t>(i)].assign(pool.begin(), pool.begin() + k);
      for (std::size_t e = 0; e < entries; ++e) tables_[static_cast<std::size_t>(i) * entries + e] = rng.uniform01();
    }
  }

  double evaluate(std::span<const std::uint8_t> x) const override {
    const std::size_t entries = std::size_t{1} << (k_ + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < neighbours_.size(); ++i) {
      std::size_t index = x[i];
      for (int j = 0; j < k_; ++j)
        index += static_cast<std::size_t>(x[static_cast<std::size_t>(neighbours_[i][static_cast<std::size_t>(j)])])
                 << (j + 1);
      sum += tables_[i * entries + index];
    }
    return -sum / static_cast<double>(neighbours_.size());
  }

 private:
  int k_;
  std::vector<std::vector<int>> neighbours_;
  std::vector<double> tables_;
};

double brute_force(const FitnessFunction& f, int n) {
  if (n > 26) throw std::invalid_argument("brute force limited to 26 variables");
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> x(static_cast<std::size_t>(n), 0);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t code = 0; code < total; ++code) {
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = (code >> i) & 1U;
    best = std::max(best, f.evaluate(x));
  }
  return best;
}

struct Definition {
  FitnessPtr fitness;
  std::optional<double> optimum_target;  // default target away from dimension 100
};

WModelLayers layers_for(int variant) {
  WModelLayers l;
  switch (variant) {
    case 0: l.dummy_fraction = 0.5; break;
    case 1: l.dummy_fraction = 0.9; break;
    case 2: l.neutrality_block = 3; break;
    case 3: l.epistasis_block = 4; break;
    case 4: l.ruggedness = Ruggedness::r1; break;
    case 5: l.ruggedness = Ruggedness::r2; break;
    case 6: l.ruggedness = Ruggedness::r3; break;
    default: break;
  }
  return l;
}

Definition define(int id, int n, std::uint64_t seed) {
  const auto dn = static_cast<double>(n);
  if (id >= 4 && id <= 17) {
    const bool on_onemax = id <= 10;
    const WModelLayers layers = layers_for(on_onemax ? id - 4 : id - 11);
    auto fitness = apply_wmodel(layers, on_onemax ? onemax() : leading_ones(), n, seed);
    const int reduced = wmodel_reduced_length(layers, n);
    double opt = reduced;
    if (layers.ruggedness == Ruggedness::r1) opt = ruggedness1(reduced, reduced);
    return {std::move(fitness), opt};
  }
  switch (id) {
    case 1: return {onemax(), dn};
    case 2: return {leading_ones(), dn};
    case 3: return {harmonic_linear(), dn * (dn + 1) / 2};
    case 18: return {labs(), std::nullopt};
    case 19: return {ising_ring(), dn};
    case 20: return {ising_torus(n), 2 * dn};
    case 21: return {ising_triangular(n), 3 * dn};
    case 22: {
      const int columns = (n - n % 2) / 2;
      return {max_independent_set(n), 2.0 * ((columns + 1) / 2)};
    }
    case 23: {
      const int side = require_square(n, "N-Queens");
      const double best = side == 1 ? 1 : side == 2 ? 1 : side == 3 ? 2 : side;
      return {n_queens(n), best};
    }
    case 24: return {concatenated_trap(5), static_cast<double>((n + 4) / 5)};
    case 25: return {nk_landscape(n, 1, seed), std::nullopt};
    default: break;
  }
  throw std::invalid_argument("unknown problem id " + std::to_string(id) + " (expected 1..25)");
}

}  // namespace

Problem::Problem(int id, std::string name, int dimension, std::uint64_t instance_seed, FitnessPtr fitness,
                 std::optional<double> final_target, double auc_floor)
    : id_(id),
      name_(std::move(name)),
      dimension_(dimension),
      instance_seed_(instance_seed),
      fitness_(std::move(fitness)),
      final_target_(final_target),
      auc_floor_(auc_floor) {
  if (dimension_ < 1) throw std::invalid_argument("problem dimension must be positive");
  if (!fitness_) throw std::invalid_argument("problem needs a fitness function");
}

double Problem::require_final_target() const {
  if (!final_target_)
    throw std::logic_error(name_ + " has no default final target at dimension " + std::to_string(dimension_) +
                           "; supply one explicitly");
  return *final_target_;
}

Problem Problem::with_final_target(double target) const {
  Problem p = *this;
  p.final_target_ = target;
  return p;
}

Problem Problem::with_auc_floor(double floor) const {
  Problem p = *this;
  p.auc_floor_ = floor;
  return p;
}

double Problem::evaluate(const BitString& x) const { return evaluate(x.view()); }

double Problem::evaluate(std::span<const std::uint8_t> x) const {
  if (x.size() != static_cast<std::size_t>(dimension_))
    throw std::invalid_argument(name_ + ": expected " + std::to_string(dimension_) + " bits, got " +
                                std::to_string(x.size()));
  return fitness_->evaluate(x);
}

Problem make_problem(int id, int dimension, std::uint64_t instance_seed) {
  if (id < 1 || id > kProblemCount)
    throw std::invalid_argument("unknown problem id " + std::to_string(id) + " (expected 1..25)");
  if (dimension < 4) throw std::invalid_argument("dimension must be at least 4");
  if (id == 20) require_square(dimension, "Ising torus");
  if (id == 21) require_square(dimension, "Ising triangular");
  Definition def = define(id, dimension, instance_seed);

  std::optional<double> target;
  const bool instance_bound = id == 25 && instance_seed != 0;
  if (dimension == kReferenceDimension && !instance_bound) {
    target = reference_target(id);
  } else if (def.optimum_target) {
    target = def.optimum_target;
  } else if (dimension <= kBruteForceLimit) {
    target = brute_force(*def.fitness, dimension);
  }
  return Problem(id, problem_name(id), dimension, instance_seed, std::move(def.fitness), target,
                 default_auc_floor(id));
}

Problem make_custom_problem(std::string name, int dimension, FitnessPtr fitness, double final_target,
                            double auc_floor) {
  return Problem(0, std::move(name), dimension, 0, std::move(fitness), final_target, auc_floor);
}

double reference_target(int id) {
  if (id < 1 || id > kProblemCount) throw std::invalid_argument("unknown problem id " + std::to_string(id));
  return kTargets[static_cast<std::size_t>(id - 1)];
}

double default_auc_floor(int id) {
  switch (id) {
    case 22: return -19590.0;
    case 23: return -3950000.0;
    case 25: return -1.0;
    default: return 0.0;
  }
}

std::string problem_name(int id) { return "F" + std::to_string(id); }

std::string problem_title(int id) {
  if (id < 1 || id > kProblemCount) throw std::invalid_argument("unknown problem id " + std::to_string(id));
  return kTitles[static_cast<std::size_t>(id - 1)];
}

std::optional<int> parse_problem_id(std::string_view text) {
  if (!text.empty() && (text.front() == 'F' || text.front() == 'f')) text.remove_prefix(1);
  int id = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec != std::errc{} || ptr != text.data() + text.size() || id < 1 || id > kProblemCount) return std::nullopt;
  return id;
}

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  out.reserve(kProblemCount);
  for (int id = 1; id <= kProblemCount; ++id)
    out.push_back({id, problem_name(id), problem_title(id), kReferenceDimension, reference_target(id),
                   default_auc_floor(id)});
  return out;
}

FitnessPtr onemax() { return std::make_shared<OneMax>(); }
FitnessPtr leading_ones() { return std::make_shared<LeadingOnes>(); }
FitnessPtr harmonic_linear() { return std::make_shared<HarmonicLinear>(); }
FitnessPtr labs() { return std::make_shared<Labs>(); }
FitnessPtr ising_ring() { return std::make_shared<IsingRing>(); }
FitnessPtr ising_torus(int dimension) {
  return std::make_shared<IsingLattice>(require_square(dimension, "Ising torus"), false);
}
FitnessPtr ising_triangular(int dimension) {
  return std::make_shared<IsingLattice>(require_square(dimension, "Ising triangular"), true);
}
FitnessPtr max_independent_set(int dimension) { return std::make_shared<MaxIndependentSet>(dimension); }
FitnessPtr n_queens(int dimension) { return std::make_shared<NQueens>(require_square(dimension, "N-Queens")); }
FitnessPtr concatenated_trap(int block_size) {
  if (block_size < 1) throw std::invalid_argument("trap block must be positive");
  return std::make_shared<ConcatenatedTrap>(block_size);
}
FitnessPtr nk_landscape(int dimension, int k, std::uint64_t instance_seed) {
  if (k < 0 || k >= dimension) throw std::invalid_argument("NK landscape needs 0 <= k < n");
  return std::make_shared<NKLandscape>(dimension, k, instance_seed);
}

double brute_force_max(const Problem& problem) { return brute_force(*problem.fitness(), problem.dimension()); }

}  // namespace gacfg
