#include "gacfg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "gacfg/format.hpp"
#include "gacfg/stats.hpp"

namespace gacfg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kSpecKeys = {"problem", "dim",  "tuner", "metric",      "budget",     "cutoff",
                                         "runs_per_eval", "validation_runs", "seed", "out", "repetitions",
                                         "paper_scale"};

constexpr int kBaselineRuns = 200;

int problem_from_json(const json& v) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    if (auto id = parse_problem_id(v.get<std::string>())) return *id;
  }
  throw std::invalid_argument("bad problem id " + v.dump());
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("bad value for '") + key + "': " + j.at(key).dump());
  }
}

ordered_json config_json(const GAConfig& c) {
  return {{"mu", c.mu}, {"lambda", c.lambda}, {"p_m", c.p_m}, {"p_c", c.p_c}};
}

GAConfig config_from_json(const json& j) {
  return {j.at("mu").get<int>(), j.at("lambda").get<int>(), j.at("p_m").get<double>(), j.at("p_c").get<double>()};
}

std::string config_columns(const GAConfig& c) {
  return std::to_string(c.mu) + ',' + std::to_string(c.lambda) + ',' + format_double(c.p_m) + ',' +
         format_double(c.p_c);
}

std::string dump(const ordered_json& j) { return j.dump(2) + '\n'; }

Problem load_problem(int id, int dim) {
  auto p = make_problem(id, dim);
  p.require_final_target();
  return p;
}

std::string two_digits(int t) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", t);
  return buf;
}

std::vector<int> select_points(std::span<const int> points, int count) {
  std::vector<int> out;
  if (points.empty()) {
    for (int t = 0; t < count; ++t) out.push_back(t);
    return out;
  }
  for (int t : points) {
    if (t < 0 || t >= count) throw std::invalid_argument("sweep point " + std::to_string(t) + " out of range");
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint64_t tune_seed(const ExperimentSpec& spec, int problem, std::uint64_t tag, std::uint64_t point, Metric m,
                        std::uint64_t rep) {
  return derive_seed({spec.seed, static_cast<std::uint64_t>(problem), tag, point, static_cast<std::uint64_t>(m), rep});
}

ordered_json tune_json(const ExperimentSpec& spec, const Problem& problem, Metric metric, const TuneResult& r) {
  ordered_json j;
  j["tuner"] = r.tuner;
  j["problem"] = problem.id();
  j["dim"] = problem.dimension();
  j["metric"] = std::string(metric_name(metric));
  j["budget"] = r.budget;
  j["cutoff"] = spec.cutoff;
  j["runs_per_eval"] = spec.runs_per_eval;
  j["seed"] = r.seed;
  j["target_runs_spent"] = r.target_runs_spent;
  j["best"] = config_json(r.best_config);
  j["best_cost"] = r.best_cost.to_string();
  j["elites"] = ordered_json::array();
  for (const auto& e : r.elites) j["elites"].push_back(config_json(e));
  return j;
}

std::string evaluations_csv(const TuneResult& r) {
  std::string out = "index,mu,lambda,p_m,p_c,cost\n";
  for (const auto& e : r.all_evaluated)
    out += std::to_string(e.index) + ',' + config_columns(e.config) + ',' + e.cost.to_string() + '\n';
  return out;
}

TuneResult run_tuner(TunerKind kind, const GaEvaluator& ev, std::int64_t budget, std::uint64_t seed) {
  return tune(kind, ev, budget, seed);
}

std::int64_t effective_budget(const ExperimentSpec& spec) {
  return spec.tuner == TunerKind::grid ? static_cast<std::int64_t>(grid_configurations().size()) : spec.budget;
}

double campaign_evaluations(const ExperimentSpec& spec, std::int64_t budget, std::int64_t cutoff) {
  return (static_cast<double>(budget) * spec.runs_per_eval + spec.validation_runs) * static_cast<double>(cutoff);
}

std::string fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<ComparisonRow> unadjusted_rows(const ValidationReport& base, std::span<const ValidationReport> others,
                                           std::vector<std::pair<std::vector<double>, std::vector<double>>>& samples) {
  std::vector<ComparisonRow> rows;
  const auto base_times = base.hitting_times();
  for (const auto& r : others) {
    if (r.problem_id != base.problem_id || r.dim != base.dim || r.cutoff != base.cutoff)
      throw std::invalid_argument("report " + r.label + " does not match the baseline problem, dimension or cutoff");
    ComparisonRow row;
    row.label = r.label;
    row.ert = r.ert;
    row.auc = r.auc;
    row.ert_improvement = relative_improvement_ert(base.ert, r.ert);
    row.auc_improvement = base.auc > 0 ? relative_improvement_auc(base.auc, r.auc)
                                       : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
    samples.emplace_back(r.hitting_times(), base_times);
  }
  return rows;
}

std::vector<CrossMetricRow> cross_metric_rows(std::span<const ValidationReport> reports) {
  std::map<std::string, std::pair<const ValidationReport*, const ValidationReport*>> by_tuner;
  for (const auto& r : reports) {
    if (r.tuner.empty()) continue;
    auto& slot = by_tuner[r.tuner];
    if (r.metric == "ert" && !slot.first) slot.first = &r;
    if (r.metric == "auc" && !slot.second) slot.second = &r;
  }
  std::vector<CrossMetricRow> out;
  for (const auto& [tuner, pair] : by_tuner)
    if (pair.first && pair.second)
      out.push_back({tuner, pair.first->ert, pair.second->ert, relative_ert_across_metrics(pair.first->ert, pair.second->ert)});
  return out;
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == '/' || c == '\\') c = '_';
  return s;
}

std::vector<fs::path> find_files(const fs::path& root, std::string_view name) {
  std::vector<fs::path> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() == name) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

// ---------------------------------------------------------------- spec

void ExperimentSpec::validate() const {
  if (problems.empty()) throw std::invalid_argument("no problems given");
  for (int id : problems) load_problem(id, dim);
  if (budget < 1) throw std::invalid_argument("budget must be positive");
  if (cutoff < 1) throw std::invalid_argument("cutoff must be positive");
  if (runs_per_eval < 1) throw std::invalid_argument("runs_per_eval must be at least 1");
  if (validation_runs < 0) throw std::invalid_argument("validation_runs must not be negative");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (out.empty()) throw std::invalid_argument("output directory must not be empty");
}

std::string ExperimentSpec::to_json() const {
  ordered_json j;
  j["problem"] = problems;
  j["dim"] = dim;
  j["tuner"] = std::string(tuner_name(tuner));
  j["metric"] = std::string(metric_name(metric));
  j["budget"] = budget;
  j["cutoff"] = cutoff;
  j["runs_per_eval"] = runs_per_eval;
  j["validation_runs"] = validation_runs;
  j["seed"] = seed;
  j["out"] = out;
  j["repetitions"] = repetitions;
  j["paper_scale"] = paper_scale;
  return dump(j);
}

ExperimentSpec ExperimentSpec::from_json(std::string_view text, const ExperimentSpec& defaults) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kSpecKeys.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  ExperimentSpec s = defaults;
  if (j.contains("problem")) {
    s.problems.clear();
    const auto& p = j["problem"];
    if (p.is_array()) {
      for (const auto& v : p) s.problems.push_back(problem_from_json(v));
    } else {
      s.problems.push_back(problem_from_json(p));
    }
  }
  if (j.contains("dim")) s.dim = get_as<int>(j, "dim");
  if (j.contains("tuner")) s.tuner = parse_tuner(get_as<std::string>(j, "tuner"));
  if (j.contains("metric")) s.metric = parse_metric(get_as<std::string>(j, "metric"));
  if (j.contains("budget")) s.budget = get_as<std::int64_t>(j, "budget");
  if (j.contains("cutoff")) s.cutoff = get_as<std::int64_t>(j, "cutoff");
  if (j.contains("runs_per_eval")) s.runs_per_eval = get_as<int>(j, "runs_per_eval");
  if (j.contains("validation_runs")) s.validation_runs = get_as<int>(j, "validation_runs");
  if (j.contains("seed")) s.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("out")) s.out = get_as<std::string>(j, "out");
  if (j.contains("repetitions")) s.repetitions = get_as<int>(j, "repetitions");
  if (j.contains("paper_scale")) s.paper_scale = get_as<bool>(j, "paper_scale");
  return s;
}

ExperimentSpec ExperimentSpec::from_json(std::string_view text) { return from_json(text, ExperimentSpec{}); }

ExperimentSpec ExperimentSpec::load(const fs::path& path, const ExperimentSpec& defaults) {
  return from_json(read_file(path), defaults);
}

ExperimentSpec ExperimentSpec::paper_protocol() {
  ExperimentSpec s;
  s.problems.clear();
  for (int id = 1; id <= kProblemCount; ++id) s.problems.push_back(id);
  s.dim = kReferenceDimension;
  s.budget = 5000;
  s.cutoff = 50000;
  s.runs_per_eval = 10;
  s.validation_runs = 100;
  s.paper_scale = true;
  return s;
}

void check_scale(const ExperimentSpec& spec, double evaluations, std::string_view what) {
  if (evaluations > kPaperScaleEvaluations && !spec.paper_scale)
    throw std::invalid_argument(std::string(what) + " may need up to " + format_double(evaluations) +
                                " GA evaluations; pass --paper-scale to allow campaigns above " +
                                format_double(kPaperScaleEvaluations));
}

// ---------------------------------------------------------------- validation

std::uint64_t validation_seed(std::uint64_t master_seed, int problem_id, const GAConfig& config, std::int64_t i) {
  return derive_seed(
      {master_seed, static_cast<std::uint64_t>(problem_id), config_digest(config), static_cast<std::uint64_t>(i)});
}

std::vector<double> ValidationReport::hitting_times() const {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(capped_hitting_time(r, final_target, cutoff));
  return out;
}

namespace {

void fill_statistics(ValidationReport& r, const Problem& problem) {
  r.ert = ert(r.runs, r.final_target, r.cutoff);
  r.auc = auc(r.runs, default_target_grid(problem), BudgetGrid::range(r.cutoff));
}

}  // namespace

ValidationReport validate_configuration(const GAConfig& config, const Problem& problem, std::int64_t cutoff, int runs,
                                        std::uint64_t master_seed, std::string label, unsigned threads) {
  config.validate();
  if (runs < 1) throw std::invalid_argument("validation needs at least one run");
  ValidationReport r;
  r.label = std::move(label);
  r.problem_id = problem.id();
  r.dim = problem.dimension();
  r.config = config;
  r.cutoff = cutoff;
  r.final_target = problem.require_final_target();
  r.master_seed = master_seed;
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(runs));
  for (std::size_t i = 0; i < seeds.size(); ++i)
    seeds[i] = validation_seed(master_seed, problem.id(), config, static_cast<std::int64_t>(i));
  r.runs = run_many(config, problem, {cutoff, r.final_target}, seeds, threads);
  fill_statistics(r, problem);
  return r;
}

void write_validation(const ValidationReport& r, const fs::path& dir) {
  ordered_json j;
  j["label"] = r.label;
  j["problem"] = r.problem_id;
  j["dim"] = r.dim;
  j["config"] = config_json(r.config);
  j["cutoff"] = r.cutoff;
  j["final_target"] = r.final_target;
  j["master_seed"] = r.master_seed;
  j["tuner"] = r.tuner;
  j["metric"] = r.metric;
  j["runs"] = r.runs.size();
  j["ert"] = r.ert.to_string();
  j["auc"] = format_double(r.auc);
  write_file_atomic(dir / "runs.csv", runs_csv(r.runs));
  write_file_atomic(dir / "summary.csv", summary_csv(r.runs));
  const auto problem = load_problem(r.problem_id, r.dim);
  write_file_atomic(dir / "curve.csv", curve_csv(fixed_target_curve(r.runs, default_target_grid(problem), r.cutoff)));
  write_file_atomic(dir / "report.json", dump(j));
}

ValidationReport read_validation(const fs::path& dir) {
  json j;
  try {
    j = json::parse(read_file(dir / "report.json"));
  } catch (const json::exception& e) {
    throw std::invalid_argument("cannot read " + (dir / "report.json").string() + ": " + e.what());
  }
  ValidationReport r;
  r.label = j.at("label").get<std::string>();
  r.problem_id = j.at("problem").get<int>();
  r.dim = j.at("dim").get<int>();
  r.config = config_from_json(j.at("config"));
  r.cutoff = j.at("cutoff").get<std::int64_t>();
  r.final_target = j.at("final_target").get<double>();
  r.master_seed = j.at("master_seed").get<std::uint64_t>();
  r.tuner = j.at("tuner").get<std::string>();
  r.metric = j.at("metric").get<std::string>();
  r.runs = parse_run_logs(read_file(dir / "runs.csv"), read_file(dir / "summary.csv"));
  if (r.runs.size() != j.at("runs").get<std::size_t>())
    throw std::invalid_argument("run count in " + dir.string() + " does not match its CSV files");
  fill_statistics(r, load_problem(r.problem_id, r.dim));
  return r;
}

// ---------------------------------------------------------------- comparison

std::string format_improvement(const std::optional<double>& value) {
  if (!value) return "—";
  return format_double(*value);
}

ComparisonTable compare_reports(const ValidationReport& baseline, std::span<const ValidationReport> others) {
  if (others.empty()) throw std::invalid_argument("nothing to compare with the baseline");
  std::vector<std::pair<std::vector<double>, std::vector<double>>> samples;
  ComparisonTable t;
  t.baseline = baseline.label;
  t.problem_id = baseline.problem_id;
  t.rows = unadjusted_rows(baseline, others, samples);
  const auto tests = compare_family(std::move(samples));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    t.rows[i].u_statistic = tests[i].u_statistic;
    t.rows[i].p_value = tests[i].p_value;
    t.rows[i].adjusted_p = tests[i].adjusted_p;
  }
  t.family_size = tests.size();
  t.cross_metric = cross_metric_rows(others);
  return t;
}

std::string comparison_csv(const ComparisonTable& t) {
  std::string out = "problem,baseline,label,ert,auc,ert_improvement,auc_improvement,u,p,adjusted_p,stars,family_size\n";
  for (const auto& r : t.rows)
    out += problem_name(t.problem_id) + ',' + t.baseline + ',' + r.label + ',' + r.ert.to_string() + ',' +
           format_double(r.auc) + ',' + format_improvement(r.ert_improvement) + ',' + format_double(r.auc_improvement) +
           ',' + format_double(r.u_statistic) + ',' + format_double(r.p_value) + ',' + format_double(r.adjusted_p) +
           ',' + stars(r.adjusted_p) + ',' + std::to_string(t.family_size) + '\n';
  return out;
}

std::string cross_metric_csv(const ComparisonTable& t) {
  std::string out = "problem,tuner,ert_using_ert,ert_using_auc,ratio\n";
  for (const auto& r : t.cross_metric)
    out += problem_name(t.problem_id) + ',' + r.tuner + ',' + r.ert_using_ert.to_string() + ',' +
           r.ert_using_auc.to_string() + ',' + format_double(r.ratio) + '\n';
  return out;
}

// ---------------------------------------------------------------- sweep grids

std::vector<std::int64_t> cutoff_sweep_grid(double ert_ea) {
  if (!(ert_ea > 0) || !std::isfinite(ert_ea)) throw std::invalid_argument("baseline ERT must be finite and positive");
  std::vector<std::int64_t> out;
  for (int t = 0; t <= 15; ++t) {
    // Tenths keep the factor exact before scaling.
    const double factor = (5.0 + t) / 10.0;
    out.push_back(static_cast<std::int64_t>(std::ceil(factor * ert_ea)));
  }
  return out;
}

std::vector<std::int64_t> budget_sweep_grid(std::int64_t base) {
  if (base < 1) throw std::invalid_argument("budget must be positive");
  std::vector<std::int64_t> out;
  for (int t = 0; t <= 4; ++t) out.push_back(static_cast<std::int64_t>(std::llround((2.0 + t) * base / 4.0)));
  return out;
}

// ---------------------------------------------------------------- commands

std::vector<fs::path> cmd_tune(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  const auto budget = effective_budget(spec);
  check_scale(spec, static_cast<double>(spec.problems.size()) * campaign_evaluations(spec, budget, spec.cutoff),
              "tuning");
  const fs::path root(spec.out);
  std::vector<fs::path> dirs;
  for (int id : spec.problems) {
    const auto problem = load_problem(id, spec.dim);
    const GaEvaluator ev(problem, CostSpec::for_problem(problem, spec.metric, spec.cutoff, spec.runs_per_eval), threads);
    const auto seed = tune_seed(spec, id, 0, 0, spec.metric, 0);
    const auto result = run_tuner(spec.tuner, ev, budget, seed);
    const std::string name =
        problem_name(id) + '_' + std::string(tuner_name(spec.tuner)) + '_' + std::string(metric_name(spec.metric));
    const auto dir = root / "tune" / name;
    write_file_atomic(dir / "trajectory.csv", trajectory_csv(result));
    write_file_atomic(dir / "evaluations.csv", evaluations_csv(result));
    write_file_atomic(dir / "result.json", dump(tune_json(spec, problem, spec.metric, result)));
    if (spec.validation_runs > 0 && result.target_runs_spent > 0) {
      auto report = validate_configuration(result.best_config, problem, spec.cutoff, spec.validation_runs, spec.seed,
                                           "tune/" + name, threads);
      report.tuner = result.tuner;
      report.metric = std::string(metric_name(spec.metric));
      write_validation(report, dir / "validation");
    }
    dirs.push_back(dir);
  }
  write_manifest(root);
  return dirs;
}

fs::path cmd_validate(const ExperimentSpec& spec, int problem_id, const GAConfig& config, std::string label,
                      unsigned threads) {
  config.validate();
  if (spec.validation_runs < 1) throw std::invalid_argument("validation needs at least one run");
  check_scale(spec, static_cast<double>(spec.validation_runs) * static_cast<double>(spec.cutoff), "validation");
  const auto problem = load_problem(problem_id, spec.dim);
  if (label.empty()) label = problem_name(problem_id) + "_" + (config == one_plus_one_ea(spec.dim) ? std::string("ea") : config.to_string());
  label = sanitize(label);
  const auto report = validate_configuration(config, problem, spec.cutoff, spec.validation_runs, spec.seed,
                                             "validate/" + label, threads);
  const auto dir = fs::path(spec.out) / "validate" / label;
  write_validation(report, dir);
  write_manifest(spec.out);
  return dir;
}

fs::path cmd_compare(const ExperimentSpec& spec, std::span<const fs::path> report_dirs) {
  if (report_dirs.size() < 2) throw std::invalid_argument("compare needs a baseline and at least one other report");
  const auto baseline = read_validation(report_dirs[0]);
  std::vector<ValidationReport> others;
  for (std::size_t i = 1; i < report_dirs.size(); ++i) others.push_back(read_validation(report_dirs[i]));
  const auto table = compare_reports(baseline, others);
  const auto dir = fs::path(spec.out) / "compare";
  write_file_atomic(dir / "comparison.csv", comparison_csv(table));
  write_file_atomic(dir / "cross_metric.csv", cross_metric_csv(table));
  write_manifest(spec.out);
  return dir;
}

double baseline_ert(const ExperimentSpec& spec, int problem_id, unsigned threads) {
  const auto problem = load_problem(problem_id, spec.dim);
  const auto ea = one_plus_one_ea(spec.dim);
  const auto dir = fs::path(spec.out) / "baselines" /
                   (problem_name(problem_id) + "_n" + std::to_string(spec.dim) + "_c" + std::to_string(spec.cutoff));
  std::optional<ValidationReport> report;
  if (fs::exists(dir / "report.json")) {
    auto cached = read_validation(dir);
    if (cached.master_seed == spec.seed && cached.runs.size() == static_cast<std::size_t>(kBaselineRuns) &&
        cached.config == ea)
      report = std::move(cached);
  }
  if (!report) {
    check_scale(spec, static_cast<double>(kBaselineRuns) * static_cast<double>(spec.cutoff), "baseline");
    report = validate_configuration(ea, problem, spec.cutoff, kBaselineRuns, spec.seed,
                                    "baselines/" + dir.filename().string(), threads);
    write_validation(*report, dir);
  }
  if (!report->ert.finite())
    throw std::runtime_error("the (1+1) EA never reached the target of " + problem_name(problem_id) +
                             "; supply the baseline ERT explicitly");
  return report->ert.value();
}

namespace {

struct SweepRow {
  int t;
  std::int64_t point;  // cutoff or budget
  Metric metric;
  int repetition;
  TuneResult tuned;
  ValidationReport validation;
};

std::string sweep_rows_csv(const std::vector<SweepRow>& rows, const char* point_name) {
  std::string out = std::string("t,") + point_name + ",metric,repetition,mu,lambda,p_m,p_c,tuning_cost,target_runs_spent,validation_ert,validation_auc\n";
  for (const auto& r : rows)
    out += std::to_string(r.t) + ',' + std::to_string(r.point) + ',' + std::string(metric_name(r.metric)) + ',' +
           std::to_string(r.repetition) + ',' + config_columns(r.tuned.best_config) + ',' +
           r.tuned.best_cost.to_string() + ',' + std::to_string(r.tuned.target_runs_spent) + ',' +
           r.validation.ert.to_string() + ',' + format_double(r.validation.auc) + '\n';
  return out;
}

std::string selections_csv(const std::vector<SweepRow>& rows, const char* point_name) {
  std::string out = std::string("t,") + point_name + ",metric,selection,repetition,mu,lambda,p_m,p_c,tuning_cost,validation_ert\n";
  std::map<std::pair<int, int>, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) groups[{r.t, static_cast<int>(r.metric)}].push_back(&r);
  for (const auto& [key, group] : groups) {
    const SweepRow* by_cost = group.front();
    const SweepRow* by_ert = group.front();
    for (const auto* r : group) {
      if (better(r->tuned.best_cost, by_cost->tuned.best_cost)) by_cost = r;
      if (r->validation.ert < by_ert->validation.ert) by_ert = r;
    }
    for (auto [label, r] : {std::pair{"by tuning cost", by_cost}, std::pair{"by validation ERT", by_ert}})
      out += std::to_string(r->t) + ',' + std::to_string(r->point) + ',' + std::string(metric_name(r->metric)) + ',' +
             label + ',' + std::to_string(r->repetition) + ',' + config_columns(r->tuned.best_config) + ',' +
             r->tuned.best_cost.to_string() + ',' + r->validation.ert.to_string() + '\n';
  }
  return out;
}

SweepRow sweep_point(const ExperimentSpec& spec, const Problem& problem, int t, std::int64_t cutoff,
                     std::int64_t budget, Metric metric, int rep, std::uint64_t tag, const fs::path& dir,
                     unsigned threads) {
  const GaEvaluator ev(problem, CostSpec::for_problem(problem, metric, cutoff, spec.runs_per_eval), threads);
  SweepRow row{t, tag == 1 ? cutoff : budget, metric, rep, {}, {}};
  row.tuned = run_tuner(spec.tuner, ev, budget, tune_seed(spec, problem.id(), tag, static_cast<std::uint64_t>(t), metric,
                                                          static_cast<std::uint64_t>(rep)));
  const auto name = "t" + two_digits(t) + "_" + std::string(metric_name(metric)) + "_r" + std::to_string(rep);
  const auto vruns = std::max(1, spec.validation_runs);
  row.validation = validate_configuration(row.tuned.best_config, problem, cutoff, vruns, spec.seed,
                                          (dir.parent_path().filename() / dir.filename() / name).generic_string(), threads);
  row.validation.tuner = row.tuned.tuner;
  row.validation.metric = std::string(metric_name(metric));
  write_validation(row.validation, dir / name);
  return row;
}

}  // namespace

std::vector<fs::path> cmd_sweep_cutoff(const ExperimentSpec& spec, std::optional<double> ert_ea,
                                       std::span<const int> points, unsigned threads) {
  spec.validate();
  const auto selected = select_points(points, 16);
  std::vector<fs::path> dirs;
  for (int id : spec.problems) {
    const double base = ert_ea ? *ert_ea : baseline_ert(spec, id, threads);
    const auto grid = cutoff_sweep_grid(base);
    double evaluations = 0;
    for (int t : selected) evaluations += 2.0 * spec.repetitions * campaign_evaluations(spec, spec.budget, grid[t]);
    check_scale(spec, evaluations, "cutoff sweep");
  }
  for (int id : spec.problems) {
    const auto problem = load_problem(id, spec.dim);
    const double base = ert_ea ? *ert_ea : baseline_ert(spec, id, threads);
    const auto grid = cutoff_sweep_grid(base);
    const auto dir = fs::path(spec.out) / "sweep_cutoff" / (problem_name(id) + "_" + std::string(tuner_name(spec.tuner)));
    std::vector<SweepRow> rows;
    for (int t : selected)
      for (Metric m : {Metric::ert, Metric::auc})
        for (int rep = 0; rep < spec.repetitions; ++rep)
          rows.push_back(sweep_point(spec, problem, t, grid[t], spec.budget, m, rep, 1, dir, threads));
    ordered_json meta;
    meta["problem"] = id;
    meta["dim"] = spec.dim;
    meta["tuner"] = std::string(tuner_name(spec.tuner));
    meta["baseline_ert"] = format_double(base);
    meta["baseline_source"] = ert_ea ? "supplied" : "computed";
    meta["budget"] = spec.budget;
    meta["repetitions"] = spec.repetitions;
    write_file_atomic(dir / "sweep.json", dump(meta));
    write_file_atomic(dir / "runs.csv", sweep_rows_csv(rows, "cutoff"));
    write_file_atomic(dir / "selections.csv", selections_csv(rows, "cutoff"));
    dirs.push_back(dir);
  }
  write_manifest(spec.out);
  return dirs;
}

std::vector<fs::path> cmd_sweep_budget(const ExperimentSpec& spec, std::span<const int> points, unsigned threads) {
  spec.validate();
  const auto selected = select_points(points, 5);
  const auto grid = budget_sweep_grid(spec.budget);
  double evaluations = 0;
  for (int t : selected) evaluations += 2.0 * spec.repetitions * campaign_evaluations(spec, grid[t], spec.cutoff);
  check_scale(spec, evaluations * static_cast<double>(spec.problems.size()), "budget sweep");
  std::vector<fs::path> dirs;
  for (int id : spec.problems) {
    const auto problem = load_problem(id, spec.dim);
    const auto dir = fs::path(spec.out) / "sweep_budget" / (problem_name(id) + "_" + std::string(tuner_name(spec.tuner)));
    std::vector<SweepRow> rows;
    for (int t : selected)
      for (Metric m : {Metric::ert, Metric::auc})
        for (int rep = 0; rep < spec.repetitions; ++rep)
          rows.push_back(sweep_point(spec, problem, t, spec.cutoff, grid[t], m, rep, 2, dir, threads));
    write_file_atomic(dir / "runs.csv", sweep_rows_csv(rows, "budget"));
    write_file_atomic(dir / "selections.csv", selections_csv(rows, "budget"));
    dirs.push_back(dir);
  }
  write_manifest(spec.out);
  return dirs;
}

fs::path cmd_report(const ExperimentSpec& spec) {
  const fs::path root(spec.out);
  const auto out_dir = root / "report";
  std::vector<std::pair<std::string, ValidationReport>> reports;
  for (const auto& file : find_files(root, "report.json")) {
    const auto rel = fs::relative(file.parent_path(), root).generic_string();
    if (rel.rfind("report/", 0) == 0) continue;
    auto r = read_validation(file.parent_path());
    r.label = rel;
    reports.emplace_back(rel, std::move(r));
  }
  if (reports.empty()) throw std::runtime_error("no validation reports under " + root.string());

  // Configuration table from tuning results.
  std::string configs = "problem,tuner,metric,mu,lambda,p_m,p_c,tuning_cost,target_runs_spent\n";
  for (const auto& file : find_files(root / "tune", "result.json")) {
    const auto j = json::parse(read_file(file));
    configs += problem_name(j.at("problem").get<int>()) + ',' + j.at("tuner").get<std::string>() + ',' +
               j.at("metric").get<std::string>() + ',' + config_columns(config_from_json(j.at("best"))) + ',' +
               j.at("best_cost").get<std::string>() + ',' + std::to_string(j.at("target_runs_spent").get<std::int64_t>()) +
               '\n';
  }

  // Baseline per (problem, dim, cutoff): the (1+1) EA report with most runs.
  using Key = std::tuple<int, int, std::int64_t>;
  std::map<Key, std::size_t> baseline;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i].second;
    if (!(r.config == one_plus_one_ea(r.dim))) continue;
    const Key key{r.problem_id, r.dim, r.cutoff};
    auto it = baseline.find(key);
    if (it == baseline.end() || r.runs.size() > reports[it->second].second.runs.size()) baseline[key] = i;
  }

  struct Entry {
    std::size_t base, report;
    ComparisonRow row;
  };
  std::vector<Entry> entries;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> samples;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i].second;
    auto it = baseline.find({r.problem_id, r.dim, r.cutoff});
    if (it == baseline.end() || it->second == i) continue;
    const auto rows = unadjusted_rows(reports[it->second].second, std::span(&r, 1), samples);
    entries.push_back({it->second, i, rows.front()});
  }
  const auto tests = compare_family(std::move(samples));
  std::string improvements =
      "problem,label,tuner,metric,mu,lambda,p_m,p_c,ert_ea,ert,ert_improvement,auc_ea,auc,auc_improvement,u,p,"
      "adjusted_p,stars,family_size\n";
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& base = reports[entries[k].base].second;
    const auto& r = reports[entries[k].report].second;
    const auto& row = entries[k].row;
    improvements += problem_name(r.problem_id) + ',' + r.label + ',' + r.tuner + ',' + r.metric + ',' +
                    config_columns(r.config) + ',' + base.ert.to_string() + ',' + r.ert.to_string() + ',' +
                    format_improvement(row.ert_improvement) + ',' + format_double(base.auc) + ',' +
                    format_double(r.auc) + ',' + format_double(row.auc_improvement) + ',' +
                    format_double(tests[k].u_statistic) + ',' + format_double(tests[k].p_value) + ',' +
                    format_double(tests[k].adjusted_p) + ',' + stars(tests[k].adjusted_p) + ',' +
                    std::to_string(tests.size()) + '\n';
  }

  std::string violin = "label,problem,run_id,hitting_time\n";
  for (const auto& [label, r] : reports) {
    const auto times = r.hitting_times();
    for (std::size_t i = 0; i < times.size(); ++i)
      violin += label + ',' + problem_name(r.problem_id) + ',' + std::to_string(i) + ',' + format_double(times[i]) + '\n';
    const auto problem = load_problem(r.problem_id, r.dim);
    write_file_atomic(out_dir / "curves" / (sanitize(label) + ".csv"),
                      curve_csv(fixed_target_curve(r.runs, default_target_grid(problem), r.cutoff)));
  }

  write_file_atomic(out_dir / "configurations.csv", configs);
  write_file_atomic(out_dir / "improvements.csv", improvements);
  write_file_atomic(out_dir / "violin.csv", violin);
  write_manifest(root);
  return out_dir;
}

void write_manifest(const fs::path& root) {
  std::vector<std::pair<std::string, fs::path>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).generic_string();
    if (rel == "manifest.json" || e.path().extension() == ".tmp") continue;
    files.emplace_back(rel, e.path());
  }
  std::sort(files.begin(), files.end());
  ordered_json j;
  j["artifacts"] = ordered_json::array();
  for (const auto& [rel, path] : files) {
    const auto content = read_file(path);
    j["artifacts"].push_back({{"path", rel}, {"bytes", content.size()}, {"fnv1a64", fnv1a(content)}});
  }
  write_file_atomic(root / "manifest.json", dump(j));
}

std::string catalog_json() {
  ordered_json j = ordered_json::array();
  for (const auto& e : catalog())
    j.push_back({{"id", e.id},
                 {"name", e.name},
                 {"title", e.title},
                 {"default_dimension", e.default_dimension},
                 {"final_target", e.final_target},
                 {"auc_floor", e.auc_floor}});
  return dump(j);
}

}  // namespace gacfg
