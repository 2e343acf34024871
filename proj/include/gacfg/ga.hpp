#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gacfg/bitstring.hpp"
#include "gacfg/pbo.hpp"
#include "gacfg/rng.hpp"

namespace gacfg {

/// The tunable quadruple of the (mu + lambda) GA.
struct GAConfig {
  int mu = 1;         ///< parent population size
  int lambda = 1;     ///< offspring population size
  double p_m = 0.01;  ///< mutation rate
  double p_c = 0.0;   ///< crossover probability

  /// Positive crossover probability requires more than one parent.
  bool feasible() const noexcept { return !(p_c > 0.0 && mu <= 1); }
  /// Throws std::invalid_argument if any value is out of its domain or the
  /// configuration is infeasible.
  void validate() const;

  std::string to_string() const;
  friend bool operator==(const GAConfig&, const GAConfig&) = default;
};

/// (1+1) EA with mutation rate 1/n.
GAConfig one_plus_one_ea(int dimension);

/// Stable 64-bit digest of a configuration (used for seed derivation).
std::uint64_t config_digest(const GAConfig& config);

struct RunBudget {
  std::int64_t cutoff = 50000;  ///< maximum number of fitness evaluations
  double target = 0.0;          ///< final target; the run stops once reached
};

struct Improvement {
  std::int64_t evaluation;  ///< 1-based index of the evaluation
  double best_so_far;
  friend bool operator==(const Improvement&, const Improvement&) = default;
};

/// Trace of one GA run: every strict improvement of the best-so-far fitness.
struct RunLog {
  std::vector<Improvement> improvements;
  std::int64_t total_evaluations = 0;
  std::optional<std::int64_t> hitting_time;  ///< for the run's final target
  std::uint64_t seed = 0;

  /// First evaluation whose best-so-far reaches `target`, if any.
  std::optional<std::int64_t> hitting_time_for(double target) const;
  /// Best fitness seen, or -infinity for an empty log.
  double best() const;
  /// Best-so-far value after `evaluations` evaluations (-infinity before the first).
  double best_at(std::int64_t evaluations) const;

  friend bool operator==(const RunLog&, const RunLog&) = default;
};

/// Samples the mutation strength from the binomial distribution
/// Bin(n, p_m) conditioned on a positive outcome.
class MutationStrengthSampler {
 public:
  /// Throws std::invalid_argument unless 0 < p_m < 1 and n >= 1.
  MutationStrengthSampler(int n, double p_m);

  int operator()(Rng& rng) const;
  /// Probability of strength k (0 for k outside 1..n).
  double pmf(int k) const;
  int n() const noexcept { return n_; }

 private:
  int n_;
  std::vector<double> pmf_;  // pmf_[k - 1] = P(strength = k)
  std::vector<double> cdf_;  // cdf_[k - 1] = P(strength <= k)
};

int sample_mutation_strength(int n, double p_m, Rng& rng);

/// Flips `strength` distinct, uniformly chosen positions of a copy of x.
/// Throws std::invalid_argument unless 1 <= strength <= n.
BitString standard_bit_mutation(const BitString& x, int strength, Rng& rng);

/// Each position copied from x or y with probability 1/2.
BitString uniform_crossover(const BitString& x, const BitString& y, Rng& rng);

/// Instrumentation filled in by run_ga when requested.
struct RunCounters {
  std::int64_t evaluations = 0;
  std::int64_t crossovers = 0;
  std::int64_t mutations = 0;
  std::int64_t inferred_crossovers = 0;  ///< crossover offspring equal to a parent
  std::int64_t inferred_mutations = 0;   ///< never positive: strength >= 1
  std::int64_t generations = 0;
};

struct RunOptions {
  /// Replaces the uniform random initial population (must hold mu strings of
  /// the problem's length).
  std::vector<BitString> initial_population;
  RunCounters* counters = nullptr;
  /// Called after each survivor selection with the parents' fitness values.
  std::function<void(std::span<const double>)> on_generation;
};

/// One run of the (mu + lambda) GA. Offspring are produced by uniform
/// crossover with probability p_c and by standard bit mutation otherwise;
/// crossover offspring identical to a parent inherit its fitness without an
/// evaluation. The best mu of parents and offspring survive, ties broken
/// uniformly at random. The run ends as soon as the target is reached or
/// just before an evaluation would exceed the cutoff. Initialization
/// evaluations count towards the cutoff, so a cutoff below mu gives an
/// unsuccessful run that never leaves initialization. A run with p_c = 1 whose parents
/// have all become identical can no longer evaluate anything and ends early
/// as unsuccessful.
///
/// Throws std::invalid_argument for an infeasible configuration.
RunLog run_ga(const GAConfig& config, const Problem& problem, const RunBudget& budget, std::uint64_t seed,
              const RunOptions& options = {});

/// One independent GA run per seed, returned in seed order. Work is spread
/// over `threads` threads (0 picks the hardware default); the result does
/// not depend on the thread count.
std::vector<RunLog> run_many(const GAConfig& config, const Problem& problem, const RunBudget& budget,
                             std::span<const std::uint64_t> seeds, unsigned threads = 0);

}  // namespace gacfg
