#include <catch_amalgamated.hpp>

#include <cmath>

#include "gacfg/format.hpp"
#include "gacfg/metrics.hpp"
#include "oracles.hpp"

using namespace gacfg;
using namespace oracles;

namespace {

RunLog make_log(std::vector<Improvement> imps, std::int64_t total) {
  RunLog log;
  log.improvements = std::move(imps);
  log.total_evaluations = total;
  return log;
}

}  // namespace

TEST_CASE("ERT examples") {
  const std::vector<RunLog> a = {make_log({{10, 5}}, 10), make_log({{3, 1}}, 100)};
  CHECK(ert(a, 5, 100).value() == 110.0);
  const std::vector<RunLog> b(4, make_log({{7, 1}}, 7));
  CHECK(ert(b, 1, 100).value() == 7.0);
  CHECK_FALSE(ert(b, 2, 100).finite());
  CHECK(ert(b, 2, 100) > ert(b, 1, 100));
  CHECK_THROWS_AS(ert(std::span<const RunLog>{}, 1, 10), std::invalid_argument);
}

TEST_CASE("ERT agrees with its definition on random logs") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<RunLog> runs;
    const int r = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < r; ++i) runs.push_back(random_log(rng, 40, 20));
    const double target = static_cast<double>(rng.below(22));
    const auto e = ert(runs, target, 40);
    const double o = ert_oracle(runs, target, 40);
    if (std::isinf(o)) {
      CHECK_FALSE(e.finite());
    } else {
      REQUIRE(e.finite());
      CHECK(e.value() == Catch::Approx(o).epsilon(1e-12));
      double min_hit = INFINITY;
      for (const auto& run : runs)
        if (auto h = run.hitting_time_for(target)) min_hit = std::min(min_hit, static_cast<double>(*h));
      CHECK(e.value() >= min_hit);
    }
  }
}

TEST_CASE("ECDF examples and monotonicity") {
  const TargetGrid one({1.0});
  const std::vector<RunLog> hit6 = {make_log({{6, 1}}, 6)};
  CHECK(ecdf(hit6, one, 5) == 0.0);
  CHECK(ecdf(hit6, one, 6) == 1.0);

  const TargetGrid many = TargetGrid::linspace(0, 10, 11);
  const std::vector<RunLog> all = {make_log({{1, 10}}, 1)};
  for (int t : {1, 5, 100}) CHECK(ecdf(all, many, t) == 1.0);
  const std::vector<RunLog> never = {make_log({{1, -5}}, 10)};
  for (int t : {1, 5, 100}) CHECK(ecdf(never, many, t) == 0.0);

  Rng rng(3);
  std::vector<RunLog> runs;
  for (int i = 0; i < 6; ++i) runs.push_back(random_log(rng, 50, 30));
  double prev = 0;
  for (int t = 1; t <= 50; ++t) {
    const double v = ecdf(runs, many, t);
    CHECK(v >= prev);
    prev = v;
  }
  const TargetGrid easy({1, 2, 3}), hard({11, 12, 13});
  for (int t = 1; t <= 50; t += 7) CHECK(ecdf(runs, hard, t) <= ecdf(runs, easy, t));
}

TEST_CASE("AUC examples") {
  const std::vector<RunLog> hit6 = {make_log({{6, 1}}, 10)};
  CHECK(auc(hit6, TargetGrid({1.0}), BudgetGrid::range(10)) == 0.5);
  CHECK(auc(hit6, TargetGrid({2.0}), BudgetGrid::range(10)) == 0.0);
  CHECK(auc(hit6, TargetGrid({1.0}), BudgetGrid({2, 6, 9})) == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("closed-form AUC equals the literal triple sum exactly") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = 1 + static_cast<int>(rng.below(8));
    const int m = 1 + static_cast<int>(rng.below(8));
    const int z = 1 + static_cast<int>(rng.below(8));
    std::vector<RunLog> runs;
    for (int i = 0; i < r; ++i) runs.push_back(random_log(rng, 30, 12));
    std::vector<double> targets;
    double v = static_cast<double>(rng.below(4)) - 1;
    for (int i = 0; i < m; ++i) targets.push_back(v += 0.5 + static_cast<double>(rng.below(3)));
    std::vector<std::int64_t> budgets;
    std::int64_t t = 0;
    for (int i = 0; i < z; ++i) budgets.push_back(t += 1 + static_cast<std::int64_t>(rng.below(6)));
    REQUIRE(auc(runs, TargetGrid(targets), BudgetGrid(budgets)) == auc_oracle(runs, targets, budgets));
    std::vector<std::int64_t> full;
    for (std::int64_t b = 1; b <= 30; ++b) full.push_back(b);
    REQUIRE(auc(runs, TargetGrid(targets), BudgetGrid::range(30)) == auc_oracle(runs, targets, full));
  }
}

TEST_CASE("grids validate their invariants") {
  CHECK_THROWS_AS(TargetGrid(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(TargetGrid({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(TargetGrid({2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(BudgetGrid(std::vector<std::int64_t>{}), std::invalid_argument);
  CHECK_THROWS_AS(BudgetGrid({0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(BudgetGrid({3, 3}), std::invalid_argument);
  CHECK_THROWS_AS(BudgetGrid::range(0), std::invalid_argument);
  const auto r = BudgetGrid::range(10);
  CHECK(r.size() == 10);
  CHECK(r.count_at_least(1) == 10);
  CHECK(r.count_at_least(10) == 1);
  CHECK(r.count_at_least(11) == 0);
  CHECK(r.materialize().size() == 10);
}

TEST_CASE("default target grids") {
  const auto g1 = default_target_grid(make_problem(1, 100));
  REQUIRE(g1.size() == 100);
  CHECK(g1.values().front() == 0.0);
  CHECK(g1.values().back() == 100.0);
  CHECK(g1.values()[1] - g1.values()[0] == Catch::Approx(100.0 / 99.0));
  const auto g22 = default_target_grid(make_problem(22, 100));
  CHECK(g22.values().front() == -19590.0);
  CHECK(g22.values().back() == 42.0);
  for (int id = 1; id <= kProblemCount; ++id) CHECK(default_target_grid(make_problem(id, 100)).size() == 100);
  CHECK_THROWS_AS(default_target_grid(make_problem(1, 100).with_auc_floor(100)), std::invalid_argument);
}

TEST_CASE("fixed-target curves") {
  const std::vector<RunLog> runs = {make_log({{1, 1}, {2, 2}, {3, 3}}, 3)};
  const auto curve = fixed_target_curve(runs, TargetGrid({1, 2, 3, 4}), 100);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0].ert.value() == 1.0);
  CHECK(curve[1].ert.value() == 2.0);
  CHECK(curve[2].ert.value() == 3.0);
  CHECK_FALSE(curve[3].ert.finite());
  CHECK(curve_csv(curve) == "target,ert\n1,1\n2,2\n3,3\n4,Inf\n");
}

TEST_CASE("run log CSV round trip") {
  Rng rng(8);
  std::vector<RunLog> runs;
  for (int i = 0; i < 5; ++i) {
    auto log = random_log(rng, 60, 40);
    for (auto& imp : log.improvements) imp.best_so_far += 0.1;
    log.seed = rng();
    if (!log.improvements.empty() && i % 2 == 0) log.hitting_time = log.improvements.back().evaluation;
    runs.push_back(log);
  }
  runs.push_back(make_log({}, 60));
  const auto back = parse_run_logs(runs_csv(runs), summary_csv(runs));
  CHECK(back == runs);
  CHECK_THROWS_AS(parse_run_logs("bad\n", summary_csv(runs)), std::invalid_argument);
  CHECK_THROWS_AS(parse_run_logs(runs_csv(runs), "run_id,seed,hitting_time,total_evaluations\n3,1,,5\n"),
                  std::invalid_argument);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 665.0, -0.297, 1e-300, 12345678.9})
    CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(665.0) == "665");
  CHECK(format_double(INFINITY) == "Inf");
  CHECK(std::isinf(parse_double("Inf")));
  CHECK_THROWS_AS(parse_double("1x"), std::invalid_argument);
}
