#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gacfg/ga.hpp"
#include "gacfg/metrics.hpp"
#include "gacfg/pbo.hpp"
#include "gacfg/tuner.hpp"

namespace gacfg {

/// Worst-case GA evaluations above which a campaign needs paper_scale.
inline constexpr double kPaperScaleEvaluations = 1e9;

/// Everything needed to replay a campaign. The file form is JSON with the
/// keys problem, dim, tuner, metric, budget, cutoff, runs_per_eval,
/// validation_runs, seed, out, repetitions and paper_scale; unknown keys are
/// rejected.
struct ExperimentSpec {
  std::vector<int> problems = {1};
  int dim = 100;
  TunerKind tuner = TunerKind::race;
  Metric metric = Metric::auc;
  std::int64_t budget = 500;  ///< target runs
  std::int64_t cutoff = 50000;
  int runs_per_eval = 10;
  int validation_runs = 100;
  std::uint64_t seed = 1;
  std::string out = "results";
  int repetitions = 1;  ///< tuner runs per sweep point
  bool paper_scale = false;

  /// Throws std::invalid_argument when a value is out of range or a problem
  /// cannot be built at this dimension.
  void validate() const;
  std::string to_json() const;
  /// Keys absent from `text` keep their value from `defaults`. Throws
  /// std::invalid_argument on malformed input or unknown keys.
  static ExperimentSpec from_json(std::string_view text, const ExperimentSpec& defaults);
  static ExperimentSpec from_json(std::string_view text);
  static ExperimentSpec load(const std::filesystem::path& path, const ExperimentSpec& defaults);

  /// The full protocol: all 25 problems, n = 100, 5000 target runs of 10 GA
  /// runs, cutoff 50000, 100 validation runs.
  static ExperimentSpec paper_protocol();

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Throws std::invalid_argument when `evaluations` exceeds the paper-scale
/// threshold and the spec does not allow it.
void check_scale(const ExperimentSpec& spec, double evaluations, std::string_view what);

/// Seed of validation run i: a hash of the master seed, problem id,
/// configuration digest and i.
std::uint64_t validation_seed(std::uint64_t master_seed, int problem_id, const GAConfig& config, std::int64_t i);

struct ValidationReport {
  std::string label;
  int problem_id = 0;
  int dim = 0;
  GAConfig config;
  std::int64_t cutoff = 0;
  double final_target = 0.0;
  std::uint64_t master_seed = 0;
  std::string tuner;   ///< origin of the configuration, empty if given by hand
  std::string metric;  ///< tuning metric, empty if given by hand
  std::vector<RunLog> runs;

  Ert ert = Ert::infinite();
  double auc = 0.0;

  /// Final-target hitting times capped at the cutoff, in run order.
  std::vector<double> hitting_times() const;
};

/// Runs `runs` validation runs and computes ERT and AUC (default target
/// grid, budgets 1..cutoff). Throws std::invalid_argument for an infeasible
/// configuration.
ValidationReport validate_configuration(const GAConfig& config, const Problem& problem, std::int64_t cutoff, int runs,
                                        std::uint64_t master_seed, std::string label, unsigned threads = 0);

/// Writes report.json, runs.csv, summary.csv and curve.csv into `dir`.
void write_validation(const ValidationReport& report, const std::filesystem::path& dir);
/// Reads a directory written by write_validation and recomputes every
/// statistic from the run CSVs.
ValidationReport read_validation(const std::filesystem::path& dir);

/// "Inf", "-Inf", "—" (undefined) or a shortest round-trip decimal.
std::string format_improvement(const std::optional<double>& value);

struct ComparisonRow {
  std::string label;
  Ert ert = Ert::infinite();
  double auc = 0.0;
  std::optional<double> ert_improvement;  ///< relative to the baseline
  double auc_improvement = 0.0;
  double u_statistic = 0.0;
  double p_value = 1.0;
  double adjusted_p = 1.0;
};

struct CrossMetricRow {
  std::string tuner;
  Ert ert_using_ert = Ert::infinite();
  Ert ert_using_auc = Ert::infinite();
  double ratio = 0.0;  ///< clamped to [-1, 1]
};

struct ComparisonTable {
  std::string baseline;
  int problem_id = 0;
  std::vector<ComparisonRow> rows;
  std::size_t family_size = 0;  ///< number of p-values adjusted together
  std::vector<CrossMetricRow> cross_metric;
};

/// Compares each report with the baseline: relative improvements, a
/// Mann-Whitney test on capped hitting times, and BH adjustment over all
/// rows. Reports sharing a tuner and tuned with ERT and AUC also yield a
/// cross-metric ratio. Throws std::invalid_argument when problems, dimensions
/// or cutoffs differ or `others` is empty.
ComparisonTable compare_reports(const ValidationReport& baseline, std::span<const ValidationReport> others);
std::string comparison_csv(const ComparisonTable& table);
std::string cross_metric_csv(const ComparisonTable& table);

/// ceil((0.5 + 0.1 t) * ert_ea) for t = 0..15.
std::vector<std::int64_t> cutoff_sweep_grid(double ert_ea);
/// (0.5 + 0.25 t) * base for t = 0..4.
std::vector<std::int64_t> budget_sweep_grid(std::int64_t base);

// Commands. Each writes below spec.out, refreshes the manifest and returns
// the directories it produced.

std::vector<std::filesystem::path> cmd_tune(const ExperimentSpec& spec, unsigned threads = 0);
std::filesystem::path cmd_validate(const ExperimentSpec& spec, int problem_id, const GAConfig& config,
                                   std::string label, unsigned threads = 0);
std::filesystem::path cmd_compare(const ExperimentSpec& spec, std::span<const std::filesystem::path> report_dirs);

/// ERT of the (1+1) EA from 200 runs, cached under spec.out/baselines.
double baseline_ert(const ExperimentSpec& spec, int problem_id, unsigned threads = 0);

/// Tunes with both metrics at each cutoff of the sweep grid (restricted to
/// `points` when given), validates each result at the same cutoff and
/// writes runs.csv and selections.csv (best by tuning cost and best by
/// validation ERT).
std::vector<std::filesystem::path> cmd_sweep_cutoff(const ExperimentSpec& spec,
                                                    std::optional<double> ert_ea = std::nullopt,
                                                    std::span<const int> points = {}, unsigned threads = 0);
/// One tuner run per metric at each budget of budget_sweep_grid(spec.budget).
std::vector<std::filesystem::path> cmd_sweep_budget(const ExperimentSpec& spec, std::span<const int> points = {},
                                                    unsigned threads = 0);
/// Report tables over every validation under spec.out. Throws
/// std::runtime_error when there is none.
std::filesystem::path cmd_report(const ExperimentSpec& spec);

/// Lists every file below `root` (except the manifest) with its size and
/// FNV-1a digest in root/manifest.json.
void write_manifest(const std::filesystem::path& root);

/// Machine-readable list of the benchmark problems.
std::string catalog_json();

}  // namespace gacfg
