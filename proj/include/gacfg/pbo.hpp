#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gacfg/bitstring.hpp"

namespace gacfg {

/// A deterministic maximization objective over bit strings. Implementations
/// must be immutable after construction so that concurrent calls are safe.
class FitnessFunction {
 public:
  virtual ~FitnessFunction() = default;
  virtual double evaluate(std::span<const std::uint8_t> x) const = 0;
};

using FitnessPtr = std::shared_ptr<const FitnessFunction>;

/// One pseudo-Boolean benchmark problem (F1..F25) at a fixed dimension and
/// instance. Cheap to copy; the evaluator is shared.
class Problem {
 public:
  Problem(int id, std::string name, int dimension, std::uint64_t instance_seed, FitnessPtr fitness,
          std::optional<double> final_target, double auc_floor);

  int id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  int dimension() const noexcept { return dimension_; }
  std::uint64_t instance_seed() const noexcept { return instance_seed_; }

  /// Final (ERT) target. Absent when no default exists for this
  /// dimension/instance and none was supplied.
  const std::optional<double>& final_target() const noexcept { return final_target_; }
  /// Final target, throwing std::logic_error when absent.
  double require_final_target() const;
  /// Lowest value of the AUC target grid.
  double auc_floor() const noexcept { return auc_floor_; }

  Problem with_final_target(double target) const;
  Problem with_auc_floor(double floor) const;

  /// Throws std::invalid_argument on length mismatch.
  double evaluate(const BitString& x) const;
  double evaluate(std::span<const std::uint8_t> x) const;

  const FitnessPtr& fitness() const noexcept { return fitness_; }

 private:
  int id_;
  std::string name_;
  int dimension_;
  std::uint64_t instance_seed_;
  FitnessPtr fitness_;
  std::optional<double> final_target_;
  double auc_floor_;
};

/// Builds problem F<id>. Throws std::invalid_argument for an unknown id, a
/// dimension below 4, or a dimension the problem cannot use (F20, F21 and
/// F23 need a perfect square).
Problem make_problem(int id, int dimension, std::uint64_t instance_seed = 0);

/// Wraps an arbitrary evaluator as a Problem (id 0), e.g. for experiments
/// with user-defined functions.
Problem make_custom_problem(std::string name, int dimension, FitnessPtr fitness, double final_target,
                            double auc_floor = 0.0);

inline constexpr int kProblemCount = 25;
inline constexpr int kReferenceDimension = 100;

/// Final targets used at dimension 100, indexed by id - 1.
double reference_target(int id);
/// AUC grid floor, 0 except for F22, F23 and F25.
double default_auc_floor(int id);

/// "F1".."F25".
std::string problem_name(int id);
/// Descriptive name, e.g. "OneMax" or "LeadingOnes+Epistasis".
std::string problem_title(int id);
/// Accepts "F7", "f7" or "7". Returns nullopt for anything else.
std::optional<int> parse_problem_id(std::string_view text);

struct CatalogEntry {
  int id;
  std::string name;
  std::string title;
  int default_dimension;
  double final_target;
  double auc_floor;
};

/// All 25 problems at their default dimension.
std::vector<CatalogEntry> catalog();

// Base functions and structured problems. Exposed for reuse and testing.

FitnessPtr onemax();
FitnessPtr leading_ones();
/// Sum of (i + 1) * x_i.
FitnessPtr harmonic_linear();
/// Merit factor n^2 / (2 E) of the +-1 sequence.
FitnessPtr labs();
FitnessPtr ising_ring();
/// Requires a perfect-square length.
FitnessPtr ising_torus(int dimension);
/// Requires a perfect-square length.
FitnessPtr ising_triangular(int dimension);
/// Independent-set objective on the ladder-with-diagonals graph: number of
/// selected vertices minus n times the number of selected edges.
FitnessPtr max_independent_set(int dimension);
/// Requires a perfect-square length.
FitnessPtr n_queens(int dimension);
/// Blocks of 5 deceptive trap functions; a short last block is allowed.
FitnessPtr concatenated_trap(int block_size = 5);
/// Negated mean of an NK landscape with k random neighbours per bit.
FitnessPtr nk_landscape(int dimension, int k, std::uint64_t instance_seed);

// W-model transformation layers.

enum class Ruggedness { none, r1, r2, r3 };

struct WModelLayers {
  double dummy_fraction = 1.0;  ///< (0, 1]; 1 keeps every position.
  int neutrality_block = 1;     ///< 1 disables the majority vote.
  int epistasis_block = 1;      ///< 1 disables the block remapping.
  Ruggedness ruggedness = Ruggedness::none;
};

/// Positions kept by the dummy layer: ceil(fraction * n) distinct indices
/// chosen from the seed, in ascending order.
std::vector<int> dummy_positions(int dimension, double fraction, std::uint64_t seed);
/// Majority vote over consecutive blocks; trailing bits that do not fill a
/// block are dropped. Ties (exactly half ones) vote 1.
std::vector<std::uint8_t> neutrality(std::span<const std::uint8_t> x, int block);
/// Bijective XOR remapping of each block, including a short final block.
std::vector<std::uint8_t> epistasis(std::span<const std::uint8_t> x, int block);
/// Fitness remapping for value y of a base function with optimum `length`.
double ruggedness1(double y, int length);
double ruggedness2(double y, int length);
/// Lookup table used by the third ruggedness variant; entry i maps value i.
std::vector<double> ruggedness3_table(int length);

/// Composes dummy selection, neutrality, epistasis and ruggedness (in this
/// order) in front of `base`. The base is evaluated on the reduced string;
/// ruggedness treats the reduced length as the base optimum. Throws
/// std::invalid_argument when a layer does not fit the dimension.
FitnessPtr apply_wmodel(const WModelLayers& layers, FitnessPtr base, int dimension,
                        std::uint64_t instance_seed);

/// Length of the string the base function sees after the first three layers.
int wmodel_reduced_length(const WModelLayers& layers, int dimension);

/// Exhaustive maximum over all 2^n strings. n must be at most 26.
double brute_force_max(const Problem& problem);

}  // namespace gacfg
