#include "gacfg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "gacfg/format.hpp"

namespace gacfg {

double Ert::value() const {
  if (!value_) throw std::logic_error("ERT is infinite");
  return *value_;
}

double Ert::as_double() const noexcept {
  return value_ ? *value_ : std::numeric_limits<double>::infinity();
}

std::string Ert::to_string() const { return value_ ? format_double(*value_) : "Inf"; }

TargetGrid::TargetGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("target grid is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw std::invalid_argument("target grid holds a non-finite value");
    if (i > 0 && !(values_[i - 1] < values_[i]))
      throw std::invalid_argument("target grid must be strictly increasing");
  }
}

TargetGrid TargetGrid::linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("target grid needs at least one value");
  if (count == 1) return TargetGrid({hi});
  if (!(lo < hi)) throw std::invalid_argument("target grid needs lo < hi");
  std::vector<double> values(static_cast<std::size_t>(count));
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) values[static_cast<std::size_t>(i)] = lo + step * i;
  values.back() = hi;
  return TargetGrid(std::move(values));
}

BudgetGrid::BudgetGrid(std::vector<std::int64_t> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("budget grid is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 1) throw std::invalid_argument("budgets must be positive");
    if (i > 0 && values_[i - 1] >= values_[i]) throw std::invalid_argument("budget grid must be strictly increasing");
  }
}

BudgetGrid BudgetGrid::range(std::int64_t max_budget) {
  if (max_budget < 1) throw std::invalid_argument("budget range needs a positive maximum");
  BudgetGrid grid;
  grid.range_max_ = max_budget;
  return grid;
}

std::size_t BudgetGrid::size() const noexcept {
  return is_range() ? static_cast<std::size_t>(range_max_) : values_.size();
}

std::int64_t BudgetGrid::max() const noexcept { return is_range() ? range_max_ : values_.back(); }

std::size_t BudgetGrid::count_at_least(std::int64_t time) const noexcept {
  if (is_range()) {
    if (time > range_max_) return 0;
    return static_cast<std::size_t>(range_max_ - std::max<std::int64_t>(time, 1) + 1);
  }
  return static_cast<std::size_t>(values_.end() - std::lower_bound(values_.begin(), values_.end(), time));
}

std::vector<std::int64_t> BudgetGrid::materialize() const {
  if (!is_range()) return values_;
  std::vector<std::int64_t> out(static_cast<std::size_t>(range_max_));
  for (std::int64_t t = 1; t <= range_max_; ++t) out[static_cast<std::size_t>(t - 1)] = t;
  return out;
}

Ert ert(std::span<const RunLog> runs, double target, std::int64_t cutoff) {
  if (runs.empty()) throw std::invalid_argument("ERT of an empty run set");
  double total = 0.0;
  std::size_t successes = 0;
  for (const auto& run : runs) {
    const auto hit = run.hitting_time_for(target);
    if (hit && *hit <= cutoff) {
      ++successes;
      total += static_cast<double>(*hit);
    } else {
      total += static_cast<double>(cutoff);
    }
  }
  if (successes == 0) return Ert::infinite();
  return Ert::of(total / static_cast<double>(successes));
}

double ecdf(std::span<const RunLog> runs, const TargetGrid& targets, std::int64_t budget) {
  if (budget < 1) throw std::invalid_argument("ECDF budget must be positive");
  if (runs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& run : runs) {
    const double best = run.best_at(budget);
    const auto t = targets.values();
    hits += static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), best) - t.begin());
  }
  return static_cast<double>(hits) / static_cast<double>(runs.size() * targets.size());
}

namespace {

std::uint64_t satisfied_triples(const RunLog& run, const TargetGrid& targets, const BudgetGrid& budgets) {
  std::uint64_t count = 0;
  // Walk targets and improvements together: both are sorted.
  const auto& imps = run.improvements;
  std::size_t k = 0;
  for (double target : targets.values()) {
    while (k < imps.size() && imps[k].best_so_far < target) ++k;
    if (k == imps.size()) break;
    count += budgets.count_at_least(imps[k].evaluation);
  }
  return count;
}

}  // namespace

double auc(std::span<const RunLog> runs, const TargetGrid& targets, const BudgetGrid& budgets) {
  if (runs.empty()) return 0.0;
  std::uint64_t count = 0;
  for (const auto& run : runs) count += satisfied_triples(run, targets, budgets);
  const double denom =
      static_cast<double>(runs.size()) * static_cast<double>(targets.size()) * static_cast<double>(budgets.size());
  return static_cast<double>(count) / denom;
}

TargetGrid default_target_grid(const Problem& problem, int count) {
  const double hi = problem.require_final_target();
  const double lo = problem.auc_floor();
  if (!(lo < hi))
    throw std::invalid_argument("AUC floor " + format_double(lo) + " is not below the final target " +
                                format_double(hi) + " for " + problem.name());
  return TargetGrid::linspace(lo, hi, count);
}

std::vector<CurvePoint> fixed_target_curve(std::span<const RunLog> runs, const TargetGrid& targets,
                                           std::int64_t cutoff) {
  std::vector<CurvePoint> curve;
  curve.reserve(targets.size());
  for (double target : targets.values()) curve.push_back({target, ert(runs, target, cutoff)});
  return curve;
}

double capped_hitting_time(const RunLog& run, double target, std::int64_t cutoff) {
  const auto hit = run.hitting_time_for(target);
  return static_cast<double>(hit && *hit <= cutoff ? *hit : cutoff);
}

std::string runs_csv(std::span<const RunLog> runs) {
  std::string out = "run_id,seed,evaluation_index,best_so_far\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto prefix = std::to_string(i) + ',' + std::to_string(runs[i].seed) + ',';
    for (const auto& imp : runs[i].improvements)
      out += prefix + std::to_string(imp.evaluation) + ',' + format_double(imp.best_so_far) + '\n';
  }
  return out;
}

std::string summary_csv(std::span<const RunLog> runs) {
  std::string out = "run_id,seed,hitting_time,total_evaluations\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    out += std::to_string(i) + ',' + std::to_string(r.seed) + ',' +
           (r.hitting_time ? std::to_string(*r.hitting_time) : std::string()) + ',' +
           std::to_string(r.total_evaluations) + '\n';
  }
  return out;
}

namespace {

template <typename Fn>
void for_each_row(std::string_view text, std::string_view header, std::size_t columns, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line_no == 1) {
      if (line != header) throw std::invalid_argument("unexpected CSV header '" + std::string(line) + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != columns)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                                  " fields");
    fn(fields);
  }
  if (line_no == 0) throw std::invalid_argument("empty CSV input");
}

}  // namespace

std::vector<RunLog> parse_run_logs(std::string_view runs_text, std::string_view summary_text) {
  std::vector<RunLog> logs;
  for_each_row(summary_text, "run_id,seed,hitting_time,total_evaluations", 4, [&](const auto& f) {
    const auto id = parse_int(f[0]);
    if (id != static_cast<long long>(logs.size())) throw std::invalid_argument("summary run ids must be 0, 1, 2, ...");
    RunLog log;
    log.seed = static_cast<std::uint64_t>(std::stoull(std::string(f[1])));
    if (!f[2].empty()) log.hitting_time = parse_int(f[2]);
    log.total_evaluations = parse_int(f[3]);
    logs.push_back(std::move(log));
  });
  for_each_row(runs_text, "run_id,seed,evaluation_index,best_so_far", 4, [&](const auto& f) {
    const auto id = parse_int(f[0]);
    if (id < 0 || id >= static_cast<long long>(logs.size()))
      throw std::invalid_argument("run id " + std::string(f[0]) + " missing from summary");
    auto& log = logs[static_cast<std::size_t>(id)];
    const Improvement imp{parse_int(f[2]), parse_double(f[3])};
    if (!log.improvements.empty() &&
        (imp.evaluation <= log.improvements.back().evaluation || imp.best_so_far <= log.improvements.back().best_so_far))
      throw std::invalid_argument("improvements of run " + std::string(f[0]) + " are not strictly increasing");
    log.improvements.push_back(imp);
  });
  return logs;
}

std::string curve_csv(std::span<const CurvePoint> curve) {
  std::string out = "target,ert\n";
  for (const auto& p : curve) out += format_double(p.target) + ',' + p.ert.to_string() + '\n';
  return out;
}

}  // namespace gacfg
