#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gacfg/format.hpp"
#include "gacfg/tuner.hpp"
#include "tuner_internal.hpp"

namespace gacfg {

bool ParameterSpace::contains(const GAConfig& c) const noexcept {
  return c.mu >= mu_min && c.mu <= mu_max && c.lambda >= lambda_min && c.lambda <= lambda_max &&
         c.p_m >= p_m_min && c.p_m <= p_m_max && c.p_c >= p_c_min && c.p_c <= p_c_max;
}

std::string_view metric_name(Metric m) { return m == Metric::ert ? "ert" : "auc"; }

Metric parse_metric(std::string_view text) {
  if (text == "ert" || text == "ERT") return Metric::ert;
  if (text == "auc" || text == "AUC") return Metric::auc;
  throw std::invalid_argument("unknown metric '" + std::string(text) + "' (expected ert or auc)");
}

CostSpec CostSpec::for_problem(const Problem& problem, Metric metric, std::int64_t cutoff, int runs_per_eval) {
  CostSpec spec;
  spec.metric = metric;
  spec.final_target = problem.require_final_target();
  spec.cutoff = cutoff;
  spec.runs_per_eval = runs_per_eval;
  if (metric == Metric::auc) {
    spec.targets = default_target_grid(problem);
    spec.budgets = BudgetGrid::range(cutoff);
  }
  spec.validate();
  return spec;
}

void CostSpec::validate() const {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be positive");
  if (runs_per_eval < 1) throw std::invalid_argument("runs per evaluation must be at least 1");
  if (!std::isfinite(final_target)) throw std::invalid_argument("final target must be finite");
  if (metric == Metric::auc && (!targets || !budgets))
    throw std::invalid_argument("AUC cost needs target and budget grids");
}

double Cost::as_double() const noexcept {
  switch (kind) {
    case Kind::finite: return value;
    case Kind::infinite: return std::numeric_limits<double>::infinity();
    case Kind::infeasible: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string Cost::to_string() const {
  switch (kind) {
    case Kind::finite: return format_double(value);
    case Kind::infinite: return "Inf";
    case Kind::infeasible: break;
  }
  return "infeasible";
}

bool better(const Cost& a, const Cost& b) noexcept {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  switch (a.kind) {
    case Cost::Kind::finite: return a.value < b.value;
    case Cost::Kind::infinite: return a.best_reached > b.best_reached;
    case Cost::Kind::infeasible: break;
  }
  return false;
}

Cost aggregate_cost(Metric metric, std::span<const RunOutcome> runs) {
  if (runs.empty()) return Cost::infeasible();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : runs) best = std::max(best, r.best);
  if (metric == Metric::auc) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r.auc;
    return Cost::finite(-sum / static_cast<double>(runs.size()), best);
  }
  double total = 0.0;
  int successes = 0;
  for (const auto& r : runs) {
    total += r.capped_time;
    successes += r.success ? 1 : 0;
  }
  if (successes == 0) return Cost::infinite(best);
  return Cost::finite(total / successes, best);
}

std::vector<double> race_samples(Metric metric, std::span<const RunOutcome> runs) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(metric == Metric::auc ? -r.auc : r.capped_time);
  return out;
}

GaEvaluator::GaEvaluator(Problem problem, CostSpec cost, unsigned threads)
    : problem_(std::move(problem)), cost_(std::move(cost)), threads_(threads) {
  cost_.validate();
}

Evaluation GaEvaluator::evaluate(const GAConfig& config, std::uint64_t seed) const {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cost_.runs_per_eval));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = derive_seed({seed, i});
  const auto logs = run_many(config, problem_, {cost_.cutoff, cost_.final_target}, seeds, threads_);
  Evaluation ev;
  ev.config = config;
  ev.runs.reserve(logs.size());
  for (const auto& log : logs) {
    RunOutcome o;
    o.capped_time = capped_hitting_time(log, cost_.final_target, cost_.cutoff);
    o.success = log.hitting_time.has_value();
    o.best = log.best();
    if (cost_.metric == Metric::auc) o.auc = auc(std::span(&log, 1), *cost_.targets, *cost_.budgets);
    ev.runs.push_back(o);
  }
  ev.cost = aggregate_cost(cost_.metric, ev.runs);
  return ev;
}

Evaluation evaluate_configuration(const GAConfig& config, const Problem& problem, const CostSpec& cost, Rng& rng) {
  const auto seed = rng.next_seed();
  if (!config.feasible()) return {config, Cost::infeasible(), {}};
  return GaEvaluator(problem, cost).evaluate(config, seed);
}

std::string trajectory_csv(const TuneResult& result) {
  std::string out = "target_runs_spent,mu,lambda,p_m,p_c,cost\n";
  for (const auto& p : result.trajectory)
    out += std::to_string(p.target_runs_spent) + ',' + std::to_string(p.config.mu) + ',' +
           std::to_string(p.config.lambda) + ',' + format_double(p.config.p_m) + ',' + format_double(p.config.p_c) +
           ',' + p.cost.to_string() + '\n';
  return out;
}

namespace detail {

TuneRecorder::TuneRecorder(std::string tuner, std::int64_t budget, std::uint64_t seed) : budget_(budget) {
  result_.tuner = std::move(tuner);
  result_.budget = budget;
  result_.seed = seed;
}

Evaluation TuneRecorder::evaluate(const ConfigurationEvaluator& evaluator, const GAConfig& config,
                                  std::uint64_t seed) {
  if (!has_budget()) throw std::logic_error("tuning budget exhausted");
  auto ev = evaluator.evaluate(config, seed);
  ++spent_;
  result_.all_evaluated.push_back({spent_, config, ev.cost});
  if (!best_ || better(ev.cost, best_->cost)) {
    best_ = ev;
    result_.trajectory.push_back({spent_, config, ev.cost});
  }
  return ev;
}

void TuneRecorder::record_infeasible(const GAConfig& config) {
  result_.all_evaluated.push_back({0, config, Cost::infeasible()});
}

TuneResult TuneRecorder::finish() {
  result_.target_runs_spent = spent_;
  if (best_) {
    result_.best_config = best_->config;
    result_.best_cost = best_->cost;
  }
  return std::move(result_);
}

GAConfig sample_uniform(const ParameterSpace& space, Rng& rng, bool log_pm) {
  GAConfig c;
  c.mu = static_cast<int>(rng.uniform_int(space.mu_min, space.mu_max));
  c.lambda = static_cast<int>(rng.uniform_int(space.lambda_min, space.lambda_max));
  c.p_m = log_pm ? std::exp(rng.uniform(std::log(space.p_m_min), std::log(space.p_m_max)))
                 : rng.uniform(space.p_m_min, space.p_m_max);
  c.p_m = std::clamp(c.p_m, space.p_m_min, space.p_m_max);
  c.p_c = c.mu > 1 ? rng.uniform(space.p_c_min, space.p_c_max) : 0.0;
  return c;
}

}  // namespace detail

std::vector<GAConfig> grid_configurations() {
  std::vector<GAConfig> grid;
  for (int mu : {10, 50, 100})
    for (int lambda : {1, mu / 2, mu})
      for (double p_c : {0.0, 0.5}) grid.push_back({mu, lambda, 0.01, p_c});
  return grid;
}

TuneResult grid_search(const ConfigurationEvaluator& evaluator, std::uint64_t seed) {
  const auto grid = grid_configurations();
  detail::TuneRecorder rec("grid", static_cast<std::int64_t>(grid.size()), seed);
  for (std::size_t i = 0; i < grid.size(); ++i) rec.evaluate(evaluator, grid[i], derive_seed({seed, i}));
  return rec.finish();
}

TuneResult random_search(const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed,
                         const ParameterSpace& space) {
  if (budget < 1) throw std::invalid_argument("random search needs a positive budget");
  detail::TuneRecorder rec("random", budget, seed);
  Rng rng(seed);
  while (rec.has_budget()) {
    const auto c = detail::sample_uniform(space, rng, false);
    rec.evaluate(evaluator, c, rng.next_seed());
  }
  return rec.finish();
}

std::string_view tuner_name(TunerKind t) {
  switch (t) {
    case TunerKind::race: return "race";
    case TunerKind::mies: return "mies";
    case TunerKind::grid: return "grid";
    case TunerKind::random: return "random";
  }
  return "?";
}

TunerKind parse_tuner(std::string_view text) {
  if (text == "race" || text == "irace") return TunerKind::race;
  if (text == "mies") return TunerKind::mies;
  if (text == "grid") return TunerKind::grid;
  if (text == "random") return TunerKind::random;
  throw std::invalid_argument("unknown tuner '" + std::string(text) + "' (expected race, mies, grid or random)");
}

TuneResult tune(TunerKind kind, const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed) {
  switch (kind) {
    case TunerKind::race: return tune_race(evaluator, budget, seed);
    case TunerKind::mies: return tune_mies(evaluator, budget, seed);
    case TunerKind::grid: return grid_search(evaluator, seed);
    case TunerKind::random: return random_search(evaluator, budget, seed);
  }
  throw std::invalid_argument("unknown tuner");
}

}  // namespace gacfg
