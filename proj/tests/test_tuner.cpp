#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "gacfg/tuner.hpp"

using namespace gacfg;

namespace {

// Deterministic bowl with its minimum 10 at (30, 20, 0.05, 0.3).
double bowl(const GAConfig& c) {
  const double pm = std::log(c.p_m / 0.05);
  return 10.0 + (c.mu - 30) * (c.mu - 30) / 100.0 + (c.lambda - 20) * (c.lambda - 20) / 100.0 + pm * pm +
         (c.p_c - 0.3) * (c.p_c - 0.3);
}

class BowlEvaluator : public ConfigurationEvaluator {
 public:
  Evaluation evaluate(const GAConfig& config, std::uint64_t) const override {
    REQUIRE(config.feasible());
    ++calls;
    RunOutcome o{bowl(config), true, 0.0, 1.0};
    return {config, aggregate_cost(Metric::ert, std::span(&o, 1)), {o}};
  }
  Metric metric() const override { return Metric::ert; }
  mutable int calls = 0;
};

// Noisy capped times: a mean per configuration plus seed-driven noise, so
// candidates evaluated with the same seed share their noise.
class NoisyEvaluator : public ConfigurationEvaluator {
 public:
  explicit NoisyEvaluator(std::function<double(const GAConfig&)> mean) : mean_(std::move(mean)) {}
  Evaluation evaluate(const GAConfig& config, std::uint64_t seed) const override {
    REQUIRE(config.feasible());
    Rng rng(derive_seed({seed, config_digest(config)}));
    std::vector<RunOutcome> runs;
    for (int i = 0; i < 3; ++i) runs.push_back({std::max(1.0, mean_(config) + 20.0 * rng.normal()), true, 0.0, 1.0});
    return {config, aggregate_cost(Metric::ert, runs), runs};
  }
  Metric metric() const override { return Metric::ert; }

 private:
  std::function<double(const GAConfig&)> mean_;
};

void check_bookkeeping(const TuneResult& r, std::int64_t budget) {
  REQUIRE(r.target_runs_spent <= budget);
  std::int64_t paid = 0;
  for (const auto& e : r.all_evaluated) {
    if (e.index > 0) {
      ++paid;
      CHECK(e.index == paid);
      CHECK(e.config.feasible());
    } else {
      CHECK(e.cost.kind == Cost::Kind::infeasible);
    }
  }
  CHECK(paid == r.target_runs_spent);
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
    CHECK(r.trajectory[i].target_runs_spent > r.trajectory[i - 1].target_runs_spent);
    CHECK(better(r.trajectory[i].cost, r.trajectory[i - 1].cost));
  }
}

}  // namespace

TEST_CASE("cost ordering", "[tuner]") {
  const auto f1 = Cost::finite(1.0, 0), f2 = Cost::finite(2.0, 0);
  const auto i_lo = Cost::infinite(3.0), i_hi = Cost::infinite(5.0), bad = Cost::infeasible();
  CHECK(better(f1, f2));
  CHECK_FALSE(better(f2, f1));
  CHECK_FALSE(better(f1, f1));
  CHECK(better(f2, i_hi));
  CHECK(better(i_hi, i_lo));
  CHECK(better(i_lo, bad));
  CHECK_FALSE(better(bad, bad));
  CHECK(i_hi.to_string() == "Inf");
  CHECK(bad.to_string() == "infeasible");
  CHECK(std::isnan(bad.as_double()));
}

TEST_CASE("aggregate cost", "[tuner]") {
  std::vector<RunOutcome> runs = {{10, true, 0.2, 5}, {100, false, 0.4, 3}, {30, true, 0.6, 5}};
  CHECK(aggregate_cost(Metric::ert, runs) == Cost::finite(70.0, 5));
  CHECK(aggregate_cost(Metric::auc, runs).value == Catch::Approx(-0.4));
  std::vector<RunOutcome> fails = {{100, false, 0, 2}, {100, false, 0, 4}};
  CHECK(aggregate_cost(Metric::ert, fails) == Cost::infinite(4));
  CHECK(aggregate_cost(Metric::ert, {}).kind == Cost::Kind::infeasible);
  CHECK(race_samples(Metric::ert, runs) == std::vector<double>{10, 100, 30});
  CHECK(race_samples(Metric::auc, runs) == std::vector<double>{-0.2, -0.4, -0.6});
}

TEST_CASE("grid configurations", "[tuner]") {
  const auto grid = grid_configurations();
  REQUIRE(grid.size() == 18);
  CHECK(std::find(grid.begin(), grid.end(), GAConfig{10, 1, 0.01, 0.5}) != grid.end());
  CHECK(std::find(grid.begin(), grid.end(), GAConfig{100, 50, 0.01, 0.0}) != grid.end());
  std::set<std::tuple<int, int, double>> distinct;
  for (const auto& c : grid) {
    CHECK(c.p_m == 0.01);
    CHECK(c.feasible());
    distinct.insert({c.mu, c.lambda, c.p_c});
  }
  CHECK(distinct.size() == 18);

  BowlEvaluator ev;
  const auto r = grid_search(ev, 1);
  CHECK(r.target_runs_spent == 18);
  CHECK(ev.calls == 18);
  double best = INFINITY;
  for (const auto& c : grid) best = std::min(best, bowl(c));
  CHECK(r.best_cost.value == best);
  check_bookkeeping(r, 18);
}

TEST_CASE("random search", "[tuner]") {
  BowlEvaluator ev;
  const auto r = random_search(ev, 10, 42);
  CHECK(r.target_runs_spent == 10);
  CHECK(r.all_evaluated.size() == 10);
  CHECK(ev.calls == 10);
  for (const auto& e : r.all_evaluated) {
    CHECK(ParameterSpace{}.feasible(e.config));
    if (e.config.mu == 1) CHECK(e.config.p_c == 0.0);
  }
  check_bookkeeping(r, 10);
  const auto again = random_search(ev, 10, 42);
  CHECK(again.best_config == r.best_config);
  CHECK_THROWS_AS(random_search(ev, 0, 1), std::invalid_argument);
}

TEST_CASE("configuration evaluation on the GA", "[tuner]") {
  const auto problem = make_problem(1, 20);
  Rng rng(3);
  SECTION("infeasible configurations run nothing") {
    const auto spec = CostSpec::for_problem(problem, Metric::ert, 1000, 5);
    const auto ev = evaluate_configuration({1, 1, 0.05, 0.5}, problem, spec, rng);
    CHECK(ev.cost.kind == Cost::Kind::infeasible);
    CHECK(ev.runs.empty());
  }
  SECTION("ERT of successful runs") {
    const auto spec = CostSpec::for_problem(problem, Metric::ert, 5000, 5);
    const auto ev = evaluate_configuration({1, 1, 0.05, 0.0}, problem, spec, rng);
    REQUIRE(ev.runs.size() == 5);
    CHECK(ev.cost.kind == Cost::Kind::finite);
    CHECK(ev.cost.best_reached == 20);
  }
  SECTION("AUC cost is zero when nothing beyond the floor is reached") {
    // OneMax on 20 bits never reaches 100 or 200.
    auto spec = CostSpec::for_problem(problem, Metric::auc, 200, 2);
    spec.targets = TargetGrid({100.0, 200.0});
    const auto ev = evaluate_configuration({1, 1, 0.05, 0.0}, problem, spec, rng);
    CHECK(ev.cost == Cost::finite(-0.0, ev.cost.best_reached));
    CHECK(ev.cost.value == 0.0);
  }
  SECTION("same seed same evaluation") {
    const auto spec = CostSpec::for_problem(problem, Metric::auc, 500, 3);
    GaEvaluator ga(problem, spec);
    const auto a = ga.evaluate({5, 5, 0.05, 0.5}, 9);
    const auto b = ga.evaluate({5, 5, 0.05, 0.5}, 9);
    CHECK(a.runs == b.runs);
    CHECK(a.cost.value < 0.0);
    CHECK(a.cost.value >= -1.0);
  }
}

TEST_CASE("MIES converges on a bowl", "[tuner][mies]") {
  BowlEvaluator ev;
  const auto r = tune_mies(ev, 1500, 11);
  check_bookkeeping(r, 1500);
  CHECK(r.target_runs_spent == 1500);
  CHECK(r.best_cost.value <= 10.2);
  CHECK(r.elites.size() <= 4);
  CHECK(ev.calls == 1500);
  for (const auto& e : r.all_evaluated)
    if (e.index > 0) CHECK(ParameterSpace{}.contains(e.config));
}

TEST_CASE("MIES is deterministic and validates its budget", "[tuner][mies]") {
  BowlEvaluator ev;
  const auto a = tune_mies(ev, 100, 5);
  const auto b = tune_mies(ev, 100, 5);
  CHECK(a.best_config == b.best_config);
  CHECK(a.all_evaluated.size() == b.all_evaluated.size());
  CHECK_THROWS_AS(tune_mies(ev, 31, 5), std::invalid_argument);
  CHECK_NOTHROW(tune_mies(ev, 32, 5));
}

TEST_CASE("MIES skips infeasible offspring without paying", "[tuner][mies]") {
  // Optimum at mu = 1 with p_c > 0 pushes offspring into the infeasible corner.
  class Corner : public ConfigurationEvaluator {
   public:
    Evaluation evaluate(const GAConfig& c, std::uint64_t) const override {
      REQUIRE(c.feasible());
      RunOutcome o{1.0 + c.mu + 10.0 * (1.0 - c.p_c), true, 0, 1};
      return {c, aggregate_cost(Metric::ert, std::span(&o, 1)), {o}};
    }
    Metric metric() const override { return Metric::ert; }
  } ev;
  const auto r = tune_mies(ev, 300, 2);
  check_bookkeeping(r, 300);
  const auto infeasible = std::count_if(r.all_evaluated.begin(), r.all_evaluated.end(),
                                        [](const EvaluatedConfig& e) { return e.index == 0; });
  CHECK(infeasible > 0);
}

TEST_CASE("race keeps a dominant candidate", "[tuner][race]") {
  const GAConfig dominant{7, 7, 0.1, 0.5};
  std::vector<GAConfig> candidates = {dominant};
  for (int i = 1; i < 10; ++i) candidates.push_back({7 + i, 7, 0.1, 0.5});
  NoisyEvaluator ev([&](const GAConfig& c) { return c == dominant ? 100.0 : 130.0; });
  int kept = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto r = race(candidates, ev, 200, s);
    CHECK(r.target_runs_spent <= 200);
    if (std::find(r.ranking.begin(), r.ranking.end(), dominant) != r.ranking.end()) ++kept;
  }
  CHECK(kept >= 95);
}

TEST_CASE("race eliminates and ranks", "[tuner][race]") {
  std::vector<GAConfig> candidates;
  for (int i = 0; i < 12; ++i) candidates.push_back({2 + i, 5, 0.1, 0.5});
  NoisyEvaluator ev([](const GAConfig& c) { return 100.0 + 40.0 * (c.mu - 2); });
  const auto r = race(candidates, ev, 1000, 4);
  CHECK(r.ranking.size() <= 4);
  CHECK(r.ranking.front() == candidates.front());
  CHECK(r.target_runs_spent < 12 * 50);
  for (std::size_t i = 1; i < r.costs.size(); ++i) CHECK_FALSE(better(r.costs[i], r.costs[i - 1]));
  CHECK_THROWS_AS(race(std::vector<GAConfig>{{1, 1, 0.1, 0.5}}, ev, 10, 1), std::invalid_argument);
}

TEST_CASE("iterated racing", "[tuner][race]") {
  BowlEvaluator ev;
  const auto r = tune_race(ev, 600, 8);
  check_bookkeeping(r, 600);
  CHECK(r.target_runs_spent == 600);
  CHECK(ev.calls == 600);
  CHECK(r.best_config.feasible());
  CHECK(r.best_cost.value < 12.0);
  CHECK(r.elites.front() == r.best_config);

  const auto again = tune_race(ev, 600, 8);
  CHECK(again.best_config == r.best_config);
  CHECK_THROWS_AS(tune_race(ev, 9, 8), std::invalid_argument);
  CHECK_NOTHROW(tune_race(ev, 10, 8));
}

TEST_CASE("iterated racing reaches mu = 1 without crossover", "[tuner][race]") {
  NoisyEvaluator ev([](const GAConfig& c) { return 50.0 + 10.0 * c.mu + 20.0 * c.p_c; });
  bool found = false;
  for (std::uint64_t s = 0; s < 5 && !found; ++s) {
    const auto r = tune_race(ev, 400, s);
    for (const auto& e : r.all_evaluated) CHECK(e.config.feasible());
    found = r.best_config.mu == 1 && r.best_config.p_c == 0.0;
  }
  CHECK(found);
}

TEST_CASE("tuner dispatch", "[tuner]") {
  CHECK(parse_tuner("irace") == TunerKind::race);
  CHECK(parse_tuner("mies") == TunerKind::mies);
  CHECK_THROWS_AS(parse_tuner("smac"), std::invalid_argument);
  CHECK(parse_metric("AUC") == Metric::auc);
  CHECK_THROWS_AS(parse_metric("area"), std::invalid_argument);
  BowlEvaluator ev;
  CHECK(tune(TunerKind::grid, ev, 5, 1).target_runs_spent == 18);
  CHECK(tune(TunerKind::random, ev, 5, 1).target_runs_spent == 5);
}
