#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gacfg/format.hpp"
#include "gacfg/harness.hpp"

namespace {

using namespace gacfg;
namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::string problem;
  int dim = 0;
  std::string metric;
  std::string tuner;
  std::int64_t budget = 0;
  std::int64_t cutoff = 0;
  int runs_per_eval = 0;
  int validation_runs = 0;
  std::uint64_t seed = 0;
  std::string out;
  int repetitions = 0;
  bool paper_scale = false;
  unsigned threads = 0;

  void attach(CLI::App* app, bool with_tuner = true) {
    app->add_option("--config", config, "JSON experiment file; flags override its values")->check(CLI::ExistingFile);
    app->add_option("--problem", problem, "problem ids, e.g. F1 or F1,F7,F19, or 'all'");
    app->add_option("--dim", dim, "problem dimension");
    app->add_option("--metric", metric, "tuning cost metric: ert or auc");
    if (with_tuner) app->add_option("--tuner", tuner, "race, mies, grid or random");
    app->add_option("--budget", budget, "tuner budget in target runs");
    app->add_option("--cutoff", cutoff, "evaluations per GA run");
    app->add_option("--runs-per-eval", runs_per_eval, "GA runs per target run");
    app->add_option("--validation-runs", validation_runs, "runs per validation");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--out", out, "output root (default $GACFG_OUT or ./results)");
    app->add_option("--repetitions", repetitions, "tuner runs per sweep point");
    app->add_flag("--paper-scale", paper_scale, "allow campaigns above 1e9 worst-case evaluations");
    app->add_option("--threads", threads, "worker threads for GA runs (0 = all cores)");
  }

  bool given(const CLI::App* app, const std::string& name) const {
    const auto* opt = app->get_option_no_throw(name);
    return opt && opt->count() > 0;
  }

  ExperimentSpec build(const CLI::App* app) const {
    ExperimentSpec spec;
    if (const char* env = std::getenv("GACFG_OUT"); env && *env) spec.out = env;
    if (!config.empty()) spec = ExperimentSpec::load(config, spec);
    if (given(app, "--problem")) spec.problems = parse_problems(problem);
    if (given(app, "--dim")) spec.dim = dim;
    if (given(app, "--metric")) spec.metric = parse_metric(metric);
    if (given(app, "--tuner")) spec.tuner = parse_tuner(tuner);
    if (given(app, "--budget")) spec.budget = budget;
    if (given(app, "--cutoff")) spec.cutoff = cutoff;
    if (given(app, "--runs-per-eval")) spec.runs_per_eval = runs_per_eval;
    if (given(app, "--validation-runs")) spec.validation_runs = validation_runs;
    if (given(app, "--seed")) spec.seed = seed;
    if (given(app, "--out")) spec.out = out;
    if (given(app, "--repetitions")) spec.repetitions = repetitions;
    if (paper_scale) spec.paper_scale = true;
    spec.validate();
    return spec;
  }

 private:
  static std::vector<int> parse_problems(const std::string& text) {
    std::vector<int> ids;
    if (text == "all") {
      for (int id = 1; id <= kProblemCount; ++id) ids.push_back(id);
      return ids;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto id = parse_problem_id(item);
      if (!id) throw std::invalid_argument("unknown problem '" + item + "'");
      ids.push_back(*id);
    }
    if (ids.empty()) throw std::invalid_argument("no problem given");
    return ids;
  }
};

std::vector<int> parse_points(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_int(item)));
  return out;
}

void print_dirs(const std::vector<fs::path>& dirs) {
  for (const auto& d : dirs) std::cout << d.generic_string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperparameter tuning experiments for the (mu+lambda) GA on pseudo-Boolean problems"};
  app.require_subcommand(1);

  CommonFlags tune_flags, grid_flags, validate_flags, compare_flags, cutoff_flags, budget_flags, report_flags;

  auto* tune_cmd = app.add_subcommand("tune", "tune the GA on each problem and validate the result");
  tune_flags.attach(tune_cmd);

  auto* grid_cmd = app.add_subcommand("grid", "evaluate the 18 grid configurations and validate the best");
  grid_flags.attach(grid_cmd, false);

  auto* validate_cmd = app.add_subcommand("validate", "validation runs of one configuration (default: (1+1) EA)");
  validate_flags.attach(validate_cmd, false);
  std::optional<int> mu, lambda;
  std::optional<double> p_m, p_c;
  std::string label;
  validate_cmd->add_option("--mu", mu, "parent population size");
  validate_cmd->add_option("--lambda", lambda, "offspring population size");
  validate_cmd->add_option("--pm", p_m, "mutation rate");
  validate_cmd->add_option("--pc", p_c, "crossover probability");
  validate_cmd->add_option("--label", label, "directory name below validate/");

  auto* compare_cmd = app.add_subcommand("compare", "compare validation reports with the first one");
  compare_flags.attach(compare_cmd, false);
  std::vector<std::string> report_dirs;
  compare_cmd->add_option("reports", report_dirs, "validation directories, baseline first")->required()->expected(2, -1);

  auto* cutoff_cmd = app.add_subcommand("sweep-cutoff", "tune with both metrics over the cutoff grid");
  cutoff_flags.attach(cutoff_cmd);
  std::optional<double> baseline;
  std::string cutoff_points;
  cutoff_cmd->add_option("--baseline-ert", baseline, "ERT of the (1+1) EA; computed from 200 runs when absent");
  cutoff_cmd->add_option("--points", cutoff_points, "subset of t in 0..15, e.g. 0,1,2");

  auto* budget_cmd = app.add_subcommand("sweep-budget", "tune with both metrics over the budget grid");
  budget_flags.attach(budget_cmd);
  std::string budget_points;
  budget_cmd->add_option("--points", budget_points, "subset of t in 0..4");

  auto* report_cmd = app.add_subcommand("report", "configuration and improvement tables, curves, violin data");
  report_flags.attach(report_cmd, false);

  auto* problems_cmd = app.add_subcommand("problems", "print the problem catalog as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tune_cmd) {
      print_dirs(cmd_tune(tune_flags.build(tune_cmd), tune_flags.threads));
    } else if (*grid_cmd) {
      auto spec = grid_flags.build(grid_cmd);
      spec.tuner = TunerKind::grid;
      print_dirs(cmd_tune(spec, grid_flags.threads));
    } else if (*validate_cmd) {
      const auto spec = validate_flags.build(validate_cmd);
      GAConfig config = one_plus_one_ea(spec.dim);
      if (mu) config.mu = *mu;
      if (lambda) config.lambda = *lambda;
      if (p_m) config.p_m = *p_m;
      if (p_c) config.p_c = *p_c;
      for (int id : spec.problems) {
        const auto name = label.empty() || spec.problems.size() == 1 ? label : problem_name(id) + "_" + label;
        std::cout << cmd_validate(spec, id, config, name, validate_flags.threads).generic_string() << '\n';
      }
    } else if (*compare_cmd) {
      const auto spec = compare_flags.build(compare_cmd);
      std::vector<fs::path> dirs(report_dirs.begin(), report_dirs.end());
      std::cout << cmd_compare(spec, dirs).generic_string() << '\n';
    } else if (*cutoff_cmd) {
      const auto points = parse_points(cutoff_points);
      print_dirs(cmd_sweep_cutoff(cutoff_flags.build(cutoff_cmd), baseline, points, cutoff_flags.threads));
    } else if (*budget_cmd) {
      const auto points = parse_points(budget_points);
      print_dirs(cmd_sweep_budget(budget_flags.build(budget_cmd), points, budget_flags.threads));
    } else if (*report_cmd) {
      std::cout << cmd_report(report_flags.build(report_cmd)).generic_string() << '\n';
    } else if (*problems_cmd) {
      std::cout << catalog_json();
    }
  } catch (const std::exception& e) {
    std::cerr << "gacfg: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
