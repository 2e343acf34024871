#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <json.hpp>

#include "gacfg/format.hpp"
#include "gacfg/harness.hpp"

using namespace gacfg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gacfg_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec s;
  s.problems = {1};
  s.dim = 20;
  s.tuner = TunerKind::race;
  s.metric = Metric::auc;
  s.budget = 30;
  s.cutoff = 400;
  s.runs_per_eval = 3;
  s.validation_runs = 10;
  s.seed = 7;
  s.out = out.string();
  return s;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  return files;
}

ValidationReport fake_report(std::vector<std::optional<std::int64_t>> hits, std::int64_t cutoff, std::string tuner = "",
                             std::string metric = "") {
  ValidationReport r;
  r.label = "fake";
  r.problem_id = 1;
  r.dim = 100;
  r.cutoff = cutoff;
  r.final_target = 100;
  r.tuner = std::move(tuner);
  r.metric = std::move(metric);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    RunLog log;
    log.seed = i;
    if (hits[i]) {
      log.improvements = {{1, 50.0}, {*hits[i], 100.0}};
      log.hitting_time = *hits[i];
      log.total_evaluations = *hits[i];
    } else {
      log.improvements = {{1, 50.0}};
      log.total_evaluations = cutoff;
    }
    r.runs.push_back(log);
  }
  r.ert = ert(r.runs, r.final_target, cutoff);
  r.auc = auc(r.runs, TargetGrid::linspace(0, 100, 100), BudgetGrid::range(cutoff));
  return r;
}

}  // namespace

TEST_CASE("experiment spec round-trips through JSON", "[harness]") {
  ExperimentSpec s;
  s.problems = {1, 7, 19};
  s.dim = 64;
  s.tuner = TunerKind::mies;
  s.metric = Metric::ert;
  s.budget = 1234;
  s.cutoff = 999;
  s.runs_per_eval = 3;
  s.validation_runs = 17;
  s.seed = 0xfedcba9876543210ULL;
  s.out = "some/dir";
  s.repetitions = 4;
  s.paper_scale = true;
  CHECK(ExperimentSpec::from_json(s.to_json()) == s);
  CHECK(ExperimentSpec::from_json(ExperimentSpec{}.to_json()) == ExperimentSpec{});
}

TEST_CASE("experiment spec parsing", "[harness]") {
  const auto s = ExperimentSpec::from_json(R"({"problem": "F3", "metric": "ERT", "tuner": "irace"})");
  CHECK(s.problems == std::vector<int>{3});
  CHECK(s.metric == Metric::ert);
  CHECK(s.tuner == TunerKind::race);
  CHECK(s.dim == ExperimentSpec{}.dim);
  CHECK(ExperimentSpec::from_json(R"({"problem": [1, "F2", "f25"]})").problems == std::vector<int>{1, 2, 25});

  ExperimentSpec defaults;
  defaults.out = "from_env";
  CHECK(ExperimentSpec::from_json(R"({"dim": 50})", defaults).out == "from_env");
  CHECK(ExperimentSpec::from_json(R"({"out": "x"})", defaults).out == "x");

  CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"budgt": 5})"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"budget": "many"})"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"problem": "G1"})"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json("[1, 2]"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"metric": "area"})"), std::invalid_argument);
}

TEST_CASE("experiment spec validation and scale gate", "[harness]") {
  ExperimentSpec s;
  CHECK_NOTHROW(s.validate());
  s.problems = {26};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.problems = {20};
  s.dim = 50;  // not a perfect square
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ExperimentSpec{};
  s.cutoff = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  const auto full = ExperimentSpec::paper_protocol();
  CHECK(full.problems.size() == 25);
  CHECK(full.budget == 5000);
  CHECK(full.cutoff == 50000);
  CHECK(full.runs_per_eval == 10);
  CHECK(full.validation_runs == 100);
  CHECK_NOTHROW(full.validate());

  ExperimentSpec gated;
  CHECK_NOTHROW(check_scale(gated, 1e9, "x"));
  CHECK_THROWS_AS(check_scale(gated, 2e9, "x"), std::invalid_argument);
  gated.paper_scale = true;
  CHECK_NOTHROW(check_scale(gated, 1e12, "x"));

  ExperimentSpec big = small_spec(scratch("gate"));
  big.dim = 100;
  big.budget = 5000;
  big.runs_per_eval = 10;
  big.cutoff = 50000;
  CHECK_THROWS_AS(cmd_tune(big), std::invalid_argument);
  CHECK_FALSE(fs::exists(big.out));
}

TEST_CASE("validation seeds", "[harness]") {
  const GAConfig a{1, 1, 0.01, 0.0}, b{2, 1, 0.01, 0.0};
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    seen.insert(validation_seed(1, 1, a, i));
    seen.insert(validation_seed(1, 1, b, i));
    seen.insert(validation_seed(1, 2, a, i));
    seen.insert(validation_seed(2, 1, a, i));
  }
  CHECK(seen.size() == 400);
  CHECK(validation_seed(5, 3, a, 9) == validation_seed(5, 3, a, 9));
}

TEST_CASE("validation of a configuration", "[harness]") {
  const auto problem = make_problem(1, 100);
  SECTION("the (1+1) EA on OneMax") {
    const auto r = validate_configuration(one_plus_one_ea(100), problem, 50000, 100, 1, "ea");
    REQUIRE(r.runs.size() == 100);
    REQUIRE(r.ert.finite());
    CHECK(r.ert.value() > 500);
    CHECK(r.ert.value() < 850);
    CHECK(r.auc > 0.995);
    CHECK(r.auc < 1.0);
    for (std::size_t i = 0; i < r.runs.size(); ++i)
      CHECK(r.runs[i].seed == validation_seed(1, 1, one_plus_one_ea(100), static_cast<std::int64_t>(i)));
  }
  SECTION("a single run gives its capped time over its success") {
    for (std::int64_t cutoff : {100, 50000}) {
      const auto r = validate_configuration({1, 1, 0.01, 0.0}, problem, cutoff, 1, 3, "one");
      const auto& run = r.runs.front();
      if (run.hitting_time) {
        CHECK(r.ert.value() == static_cast<double>(*run.hitting_time));
      } else {
        CHECK_FALSE(r.ert.finite());
        CHECK(r.hitting_times().front() == static_cast<double>(cutoff));
      }
    }
  }
  SECTION("infeasible configurations are rejected") {
    CHECK_THROWS_AS(validate_configuration({1, 1, 0.01, 0.5}, problem, 100, 5, 1, "bad"), std::invalid_argument);
  }
}

TEST_CASE("validation reports round-trip through their files", "[harness]") {
  const auto dir = scratch("roundtrip");
  const auto problem = make_problem(2, 30);
  auto r = validate_configuration({3, 4, 0.05, 0.5}, problem, 2000, 12, 5, "x");
  r.tuner = "race";
  r.metric = "ert";
  write_validation(r, dir);
  const auto back = read_validation(dir);
  CHECK(back.runs == r.runs);
  CHECK(back.ert == r.ert);
  CHECK(back.auc == r.auc);
  CHECK(back.config == r.config);
  CHECK(back.tuner == "race");
  CHECK(back.metric == "ert");
  CHECK(read_file(dir / "curve.csv").rfind("target,ert\n", 0) == 0);
  CHECK_FALSE(fs::exists(dir / "runs.csv.tmp"));
  fs::remove_all(dir);
}

TEST_CASE("comparison tables", "[harness]") {
  const auto ea = fake_report({600, 700, 650, 720, 610}, 1000);
  SECTION("a report against itself") {
    const auto t = compare_reports(ea, std::vector<ValidationReport>{ea});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].ert_improvement == 0.0);
    CHECK(t.rows[0].auc_improvement == 0.0);
    CHECK(t.rows[0].p_value == 1.0);
    CHECK(t.family_size == 1);
  }
  SECTION("all runs failing renders -Inf") {
    const auto failing = fake_report({std::nullopt, std::nullopt, std::nullopt}, 1000);
    const auto t = compare_reports(ea, std::vector<ValidationReport>{failing});
    CHECK(format_improvement(t.rows[0].ert_improvement) == "-Inf");
    const auto csv = comparison_csv(t);
    CHECK(csv.find(",Inf,") != std::string::npos);
    CHECK(csv.find(",-Inf,") != std::string::npos);
  }
  SECTION("undefined and infinite improvements") {
    const auto failing = fake_report({std::nullopt, std::nullopt}, 1000);
    const auto t = compare_reports(failing, std::vector<ValidationReport>{failing, ea});
    CHECK(format_improvement(t.rows[0].ert_improvement) == "—");
    CHECK(format_improvement(t.rows[1].ert_improvement) == "Inf");
    CHECK(t.family_size == 2);
  }
  SECTION("cross-metric ratio is capped") {
    const auto by_ert = fake_report({std::nullopt, std::nullopt}, 1000, "race", "ert");
    const auto by_auc = fake_report({300, 310}, 1000, "race", "auc");
    const auto t = compare_reports(ea, std::vector<ValidationReport>{by_ert, by_auc});
    REQUIRE(t.cross_metric.size() == 1);
    CHECK(t.cross_metric[0].ratio == 1.0);
    const auto csv = cross_metric_csv(t);
    CHECK(csv == "problem,tuner,ert_using_ert,ert_using_auc,ratio\nF1,race,Inf,305,1\n");
    const auto close = fake_report({320, 290}, 1000, "mies", "ert");
    const auto close_auc = fake_report({300, 310}, 1000, "mies", "auc");
    const auto t2 = compare_reports(ea, std::vector<ValidationReport>{close, close_auc});
    CHECK(t2.cross_metric[0].ratio == 0.0);
  }
  SECTION("mismatched reports are rejected") {
    auto other = ea;
    other.problem_id = 2;
    CHECK_THROWS_AS(compare_reports(ea, std::vector<ValidationReport>{other}), std::invalid_argument);
    other = ea;
    other.cutoff = 5;
    CHECK_THROWS_AS(compare_reports(ea, std::vector<ValidationReport>{other}), std::invalid_argument);
    CHECK_THROWS_AS(compare_reports(ea, std::vector<ValidationReport>{}), std::invalid_argument);
  }
}

TEST_CASE("sweep grids", "[harness]") {
  const auto cutoffs = cutoff_sweep_grid(665);
  REQUIRE(cutoffs.size() == 16);
  CHECK(cutoffs.front() == 333);
  CHECK(cutoffs[1] == 399);
  CHECK(cutoffs.back() == 1330);
  CHECK(std::is_sorted(cutoffs.begin(), cutoffs.end()));
  CHECK(cutoff_sweep_grid(100).front() == 50);
  CHECK_THROWS_AS(cutoff_sweep_grid(INFINITY), std::invalid_argument);
  CHECK(budget_sweep_grid(5000) == std::vector<std::int64_t>{2500, 3750, 5000, 6250, 7500});
}

TEST_CASE("tune command writes deterministic artifacts", "[harness]") {
  const auto a = scratch("tune_a"), b = scratch("tune_b");
  auto spec = small_spec(a);
  const auto dirs = cmd_tune(spec, 1);
  REQUIRE(dirs.size() == 1);
  CHECK(fs::exists(dirs[0] / "trajectory.csv"));
  CHECK(fs::exists(dirs[0] / "evaluations.csv"));
  CHECK(fs::exists(dirs[0] / "validation" / "report.json"));
  const auto result = nlohmann::json::parse(read_file(dirs[0] / "result.json"));
  CHECK(result.at("target_runs_spent").get<int>() <= 30);
  spec.out = b.string();
  cmd_tune(spec, 2);
  auto ta = read_tree(a), tb = read_tree(b);
  CHECK(ta == tb);

  const auto manifest = nlohmann::json::parse(ta.at("manifest.json"));
  CHECK(manifest.at("artifacts").size() == ta.size() - 1);

  spec.out = a.string();
  spec.tuner = TunerKind::grid;
  spec.validation_runs = 0;
  const auto grid_dir = cmd_tune(spec, 1).front();
  CHECK(nlohmann::json::parse(read_file(grid_dir / "result.json")).at("target_runs_spent") == 18);
  CHECK_FALSE(fs::exists(grid_dir / "validation"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("validate, compare and report commands", "[harness]") {
  const auto root = scratch("report");
  auto spec = small_spec(root);
  CHECK_THROWS_AS(cmd_report(spec), std::runtime_error);
  CHECK_THROWS_AS(cmd_validate(spec, 1, {1, 1, 0.05, 0.5}, ""), std::invalid_argument);

  const auto ea_dir = cmd_validate(spec, 1, one_plus_one_ea(spec.dim), "");
  CHECK(ea_dir.filename() == "F1_ea");
  const auto other_dir = cmd_validate(spec, 1, {4, 8, 0.05, 0.5}, "mine");
  const auto a = cmd_tune(spec, 1);
  spec.metric = Metric::ert;
  cmd_tune(spec, 1);

  const std::vector<fs::path> dirs = {ea_dir, other_dir, a.front() / "validation"};
  const auto cmp = cmd_compare(spec, dirs);
  const auto csv = read_file(cmp / "comparison.csv");
  CHECK(csv.rfind("problem,baseline,label,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK_THROWS_AS(cmd_compare(spec, std::span(dirs.data(), 1)), std::invalid_argument);

  const auto out = cmd_report(spec);
  const auto improvements = read_file(out / "improvements.csv");
  // Three non-baseline validations, adjusted as one family.
  CHECK(std::count(improvements.begin(), improvements.end(), '\n') == 4);
  CHECK(improvements.find(",3\n") != std::string::npos);
  const auto configs = read_file(out / "configurations.csv");
  CHECK(configs.rfind("problem,tuner,metric,mu,lambda,p_m,p_c,", 0) == 0);
  CHECK(std::count(configs.begin(), configs.end(), '\n') == 3);
  const auto violin = read_file(out / "violin.csv");
  CHECK(std::count(violin.begin(), violin.end(), '\n') == 1 + 4 * 10);
  CHECK(fs::exists(out / "curves" / "validate_F1_ea.csv"));

  // Curves reload into the values they were computed from.
  const auto ea = read_validation(ea_dir);
  const auto curve = read_file(out / "curves" / "validate_F1_ea.csv");
  const auto expected = fixed_target_curve(ea.runs, default_target_grid(make_problem(1, spec.dim)), spec.cutoff);
  CHECK(curve == curve_csv(expected));

  // Reports are recomputed from the stored runs.
  CHECK(improvements.find(ea.ert.to_string()) != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("cutoff and budget sweeps", "[harness]") {
  const auto root = scratch("sweep");
  auto spec = small_spec(root);
  spec.tuner = TunerKind::random;
  spec.budget = 4;
  spec.repetitions = 2;
  spec.validation_runs = 5;
  const std::vector<int> points = {0, 3};
  const auto dir = cmd_sweep_cutoff(spec, std::nullopt, points, 1).front();
  const auto runs = read_file(dir / "runs.csv");
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 1 + 2 * 2 * 2);
  const auto sel = read_file(dir / "selections.csv");
  CHECK(sel.find("by tuning cost") != std::string::npos);
  CHECK(sel.find("by validation ERT") != std::string::npos);
  CHECK(std::count(sel.begin(), sel.end(), '\n') == 1 + 2 * 2 * 2);
  const auto meta = nlohmann::json::parse(read_file(dir / "sweep.json"));
  const double base = parse_double(meta.at("baseline_ert").get<std::string>());
  CHECK(runs.find("\n0," + std::to_string(cutoff_sweep_grid(base)[0]) + ",") != std::string::npos);
  CHECK(runs.find("\n3," + std::to_string(cutoff_sweep_grid(base)[3]) + ",") != std::string::npos);

  // The baseline is cached and reused.
  const auto cached = fs::last_write_time(root / "baselines" / "F1_n20_c400" / "report.json");
  CHECK(baseline_ert(spec, 1) == base);
  CHECK(fs::last_write_time(root / "baselines" / "F1_n20_c400" / "report.json") == cached);

  const auto supplied = cmd_sweep_cutoff(spec, 100.0, std::vector<int>{0}, 1).front();
  CHECK(read_file(supplied / "runs.csv").find("\n0,50,") != std::string::npos);
  CHECK_THROWS_AS(cmd_sweep_cutoff(spec, 100.0, std::vector<int>{16}, 1), std::invalid_argument);

  const auto bdir = cmd_sweep_budget(spec, std::vector<int>{0, 4}, 1).front();
  const auto brows = read_file(bdir / "runs.csv");
  CHECK(brows.find("\n0,2,") != std::string::npos);
  CHECK(brows.find("\n4,6,") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("problem catalog", "[harness]") {
  const auto j = nlohmann::json::parse(catalog_json());
  REQUIRE(j.size() == 25);
  CHECK(j[0].at("name") == "F1");
  CHECK(j[2].at("final_target") == 5050.0);
  CHECK(j[24].at("auc_floor") == -1.0);
}
