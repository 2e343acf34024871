#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gacfg/ga.hpp"
#include "gacfg/metrics.hpp"
#include "gacfg/pbo.hpp"
#include "gacfg/rng.hpp"

namespace gacfg {

/// Box bounds of the configuration space plus the crossover constraint.
struct ParameterSpace {
  int mu_min = 1;
  int mu_max = 100;
  int lambda_min = 1;
  int lambda_max = 100;
  double p_m_min = 0.005;
  double p_m_max = 0.5;
  double p_c_min = 0.0;
  double p_c_max = 1.0;

  bool contains(const GAConfig& c) const noexcept;
  /// Inside the box and satisfying p_c > 0 => mu > 1.
  bool feasible(const GAConfig& c) const noexcept { return contains(c) && c.feasible(); }
};

enum class Metric { ert, auc };
std::string_view metric_name(Metric m);
/// "ert" or "auc"; throws std::invalid_argument otherwise.
Metric parse_metric(std::string_view text);

/// How one target run (runs_per_eval GA runs of a configuration) is scored.
struct CostSpec {
  Metric metric = Metric::ert;
  double final_target = 0.0;
  std::int64_t cutoff = 50000;
  int runs_per_eval = 10;
  std::optional<TargetGrid> targets;  ///< required for AUC
  std::optional<BudgetGrid> budgets;  ///< required for AUC

  /// The problem's final target, and for AUC its default target grid with
  /// budgets 1..cutoff.
  static CostSpec for_problem(const Problem& problem, Metric metric, std::int64_t cutoff = 50000,
                              int runs_per_eval = 10);
  /// Throws std::invalid_argument when inconsistent.
  void validate() const;
};

/// Tuner-side cost; lower is better. ERT is used directly, AUC negated.
/// Finite costs order before infinite ones (ERT with no success); two
/// infinite costs prefer the larger best-reached fitness; infeasible
/// configurations order last.
struct Cost {
  enum class Kind { finite, infinite, infeasible };
  Kind kind = Kind::infeasible;
  double value = 0.0;         ///< meaningful for finite costs
  double best_reached = 0.0;  ///< best fitness over the runs behind this cost

  static Cost finite(double value, double best_reached) { return {Kind::finite, value, best_reached}; }
  static Cost infinite(double best_reached) { return {Kind::infinite, 0.0, best_reached}; }
  static Cost infeasible() { return {Kind::infeasible, 0.0, 0.0}; }

  /// The cost as a double: value, +infinity, or NaN for infeasible.
  double as_double() const noexcept;
  std::string to_string() const;
  friend bool operator==(const Cost&, const Cost&) = default;
};
/// Strict "better than" ordering described above.
bool better(const Cost& a, const Cost& b) noexcept;

/// Per-GA-run quantities kept for racing and re-aggregation.
struct RunOutcome {
  double capped_time = 0.0;  ///< hitting time of the final target, capped at the cutoff
  bool success = false;
  double auc = 0.0;  ///< single-run AUC on the cost grids (0 for ERT specs)
  double best = 0.0;
  friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

/// Cost of a set of run outcomes under `metric` (ERT or negated mean AUC).
Cost aggregate_cost(Metric metric, std::span<const RunOutcome> runs);
/// Values compared by the racing test (lower is better): capped times for
/// ERT, negated per-run AUC for AUC.
std::vector<double> race_samples(Metric metric, std::span<const RunOutcome> runs);

struct Evaluation {
  GAConfig config;
  Cost cost;
  std::vector<RunOutcome> runs;  ///< empty for infeasible configurations
};

/// Scores one target run of a configuration. The GA-backed implementation
/// is the normal choice; tests inject synthetic cost surfaces.
class ConfigurationEvaluator {
 public:
  virtual ~ConfigurationEvaluator() = default;
  /// Called only with feasible configurations.
  virtual Evaluation evaluate(const GAConfig& config, std::uint64_t seed) const = 0;
  virtual Metric metric() const = 0;
};

/// Runs the GA runs_per_eval times with seeds derived from `seed` and scores
/// the logs under the cost spec.
class GaEvaluator final : public ConfigurationEvaluator {
 public:
  GaEvaluator(Problem problem, CostSpec cost, unsigned threads = 0);
  Evaluation evaluate(const GAConfig& config, std::uint64_t seed) const override;
  Metric metric() const override { return cost_.metric; }
  const CostSpec& cost_spec() const noexcept { return cost_; }

 private:
  Problem problem_;
  CostSpec cost_;
  unsigned threads_;
};

/// One target run with a fresh seed from `rng`. Infeasible configurations
/// return an infeasible cost without running anything.
Evaluation evaluate_configuration(const GAConfig& config, const Problem& problem, const CostSpec& cost, Rng& rng);

struct TrajectoryPoint {
  std::int64_t target_runs_spent;
  GAConfig config;
  Cost cost;  ///< best cost so far
};

struct EvaluatedConfig {
  std::int64_t index;  ///< 1-based target run number, 0 for unevaluated infeasible ones
  GAConfig config;
  Cost cost;
};

struct TuneResult {
  std::string tuner;
  GAConfig best_config;
  Cost best_cost;
  /// Best single target-run cost, recorded each time it improves.
  std::vector<TrajectoryPoint> trajectory;
  std::vector<EvaluatedConfig> all_evaluated;
  std::vector<GAConfig> elites;  ///< best first; racing and MIES only
  std::uint64_t seed = 0;
  std::int64_t budget = 0;
  std::int64_t target_runs_spent = 0;
};

std::string trajectory_csv(const TuneResult& result);

/// The 18 configurations mu in {10, 50, 100}, lambda in {1, mu/2, mu},
/// p_c in {0, 0.5}, p_m = 0.01.
std::vector<GAConfig> grid_configurations();

/// Evaluates every grid configuration once.
TuneResult grid_search(const ConfigurationEvaluator& evaluator, std::uint64_t seed);

/// Uniform feasible sampling (p_c fixed to 0 when mu = 1), one target run
/// per sample.
TuneResult random_search(const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed,
                         const ParameterSpace& space = {});

struct MiesOptions {
  int parents = 4;
  int offspring = 28;
  /// Generations in a row without a feasible offspring before giving up.
  int max_idle_generations = 1000;
};

/// (4,28) mixed-integer evolution strategy with comma selection. Throws
/// std::invalid_argument when the budget is below parents + offspring.
TuneResult tune_mies(const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed,
                     const ParameterSpace& space = {}, const MiesOptions& options = {});

struct RaceOptions {
  int iterations = 4;        ///< planned iterations; leftover budget runs more
  int min_survivors = 4;     ///< a race stops once this few candidates remain
  int first_test = 5;        ///< instances before the first elimination test
  double alpha = 0.05;
};

/// Outcome of a single race.
struct RaceResult {
  std::vector<GAConfig> ranking;  ///< surviving candidates, best first
  std::vector<Cost> costs;        ///< aggregated cost of each ranked survivor
  std::int64_t target_runs_spent = 0;
  int instances = 0;  ///< instances on which all survivors were evaluated
  std::vector<EvaluatedConfig> evaluations;
};

/// Races `candidates` over instances whose seeds derive from `seed`. Each
/// instance costs one target run per surviving candidate. After
/// `first_test` instances, a candidate whose cost is worse than the current
/// best and whose samples differ by a Mann-Whitney test at `alpha` is
/// eliminated.
RaceResult race(std::span<const GAConfig> candidates, const ConfigurationEvaluator& evaluator,
                std::int64_t budget, std::uint64_t seed, const RaceOptions& options = {});

/// Simplified iterated racing. Throws std::invalid_argument for a budget
/// below 10 target runs.
TuneResult tune_race(const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed,
                     const ParameterSpace& space = {}, const RaceOptions& options = {});

enum class TunerKind { race, mies, grid, random };
std::string_view tuner_name(TunerKind t);
/// "race", "mies", "grid" or "random"; throws std::invalid_argument otherwise.
TunerKind parse_tuner(std::string_view text);

/// Dispatches to the selected tuner (grid ignores the budget).
TuneResult tune(TunerKind kind, const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed);

}  // namespace gacfg
