#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gacfg/ga.hpp"
#include "gacfg/pbo.hpp"

namespace gacfg {

/// Expected running time. Infinite when no run reached the target; finite
/// values order before the infinite one.
class Ert {
 public:
  static Ert infinite() { return Ert(); }
  static Ert of(double value) { return Ert(value); }

  bool finite() const noexcept { return value_.has_value(); }
  /// Throws std::logic_error when infinite.
  double value() const;
  /// The value, or +infinity.
  double as_double() const noexcept;

  std::string to_string() const;

  friend bool operator==(const Ert&, const Ert&) = default;
  friend std::partial_ordering operator<=>(const Ert& a, const Ert& b) {
    return a.as_double() <=> b.as_double();
  }

 private:
  Ert() = default;
  explicit Ert(double v) : value_(v) {}
  std::optional<double> value_;
};

/// Strictly increasing fitness targets.
class TargetGrid {
 public:
  /// Throws std::invalid_argument unless non-empty and strictly increasing.
  explicit TargetGrid(std::vector<double> values);
  /// `count` equally spaced values from lo to hi, both included.
  static TargetGrid linspace(double lo, double hi, int count);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// Strictly increasing evaluation budgets. The contiguous grid 1..B is kept
/// implicit and never materialised.
class BudgetGrid {
 public:
  /// Throws std::invalid_argument unless non-empty, positive and strictly increasing.
  explicit BudgetGrid(std::vector<std::int64_t> values);
  /// The budgets 1, 2, ..., max_budget.
  static BudgetGrid range(std::int64_t max_budget);

  std::size_t size() const noexcept;
  std::int64_t max() const noexcept;
  /// Number of budgets t with t >= time.
  std::size_t count_at_least(std::int64_t time) const noexcept;
  bool is_range() const noexcept { return values_.empty(); }
  std::vector<std::int64_t> materialize() const;

 private:
  BudgetGrid() = default;
  std::int64_t range_max_ = 0;
  std::vector<std::int64_t> values_;
};

/// Sum of min(t_i, cutoff) over runs divided by the number of successful
/// runs. Throws std::invalid_argument for an empty run set.
Ert ert(std::span<const RunLog> runs, double target, std::int64_t cutoff);

/// Fraction of (run, target) pairs whose target is reached within `budget`
/// evaluations.
double ecdf(std::span<const RunLog> runs, const TargetGrid& targets, std::int64_t budget);

/// Normalised area under the ECDF curve over the target and budget grids,
/// computed as the count of satisfied (run, target, budget) triples divided
/// by r * m * z, via the number of budgets at or after each hitting time.
double auc(std::span<const RunLog> runs, const TargetGrid& targets, const BudgetGrid& budgets);

/// 100 equally spaced targets from the problem's AUC floor to its final
/// target. Throws std::invalid_argument if the floor is not below the target.
TargetGrid default_target_grid(const Problem& problem, int count = 100);

struct CurvePoint {
  double target;
  Ert ert;
};

/// ERT for every target of the grid.
std::vector<CurvePoint> fixed_target_curve(std::span<const RunLog> runs, const TargetGrid& targets,
                                           std::int64_t cutoff);

/// Hitting time capped at the cutoff (the value used in rank tests).
double capped_hitting_time(const RunLog& run, double target, std::int64_t cutoff);

// CSV forms of run logs.
//   runs:    run_id,seed,evaluation_index,best_so_far   (improvement rows only)
//   summary: run_id,seed,hitting_time,total_evaluations (hitting_time empty when absent)

std::string runs_csv(std::span<const RunLog> runs);
std::string summary_csv(std::span<const RunLog> runs);
/// Rebuilds logs from both CSV texts. Throws std::invalid_argument on
/// malformed input or inconsistent run ids.
std::vector<RunLog> parse_run_logs(std::string_view runs_text, std::string_view summary_text);

std::string curve_csv(std::span<const CurvePoint> curve);

}  // namespace gacfg
