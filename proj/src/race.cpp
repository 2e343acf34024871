#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gacfg/stats.hpp"
#include "gacfg/tuner.hpp"
#include "tuner_internal.hpp"

namespace gacfg {

namespace {

struct Candidate {
  GAConfig config;
  std::vector<std::vector<RunOutcome>> instances;  // results on instances 0, 1, ...
};

std::vector<RunOutcome> pooled(const Candidate& c, std::size_t k) {
  std::vector<RunOutcome> out;
  for (std::size_t i = 0; i < k && i < c.instances.size(); ++i)
    out.insert(out.end(), c.instances[i].begin(), c.instances[i].end());
  return out;
}

std::uint64_t instance_seed(std::uint64_t race_seed, std::size_t k) { return derive_seed({race_seed, 0x696e7374ULL, k}); }

// Races `pool` in place and returns the survivors ranked best first along
// with the number of instances they all completed.
std::pair<std::vector<Candidate>, std::size_t> run_race(std::vector<Candidate> pool,
                                                         const ConfigurationEvaluator& evaluator,
                                                         detail::TuneRecorder& rec, std::int64_t race_budget,
                                                         std::uint64_t race_seed, const RaceOptions& opt) {
  const Metric metric = evaluator.metric();
  const std::int64_t stop_at = std::min(rec.budget(), rec.spent() + race_budget);
  std::vector<std::size_t> alive(pool.size());
  std::iota(alive.begin(), alive.end(), 0);
  std::size_t k = 0;
  for (;;) {
    if (k >= static_cast<std::size_t>(opt.first_test) && alive.size() <= static_cast<std::size_t>(opt.min_survivors))
      break;
    if (alive.size() <= 1 && k > 0) break;
    bool complete = true;
    for (auto idx : alive) {
      auto& c = pool[idx];
      if (c.instances.size() > k) continue;
      if (rec.spent() >= stop_at) {
        complete = false;
        break;
      }
      c.instances.push_back(rec.evaluate(evaluator, c.config, instance_seed(race_seed, k)).runs);
    }
    if (!complete) break;
    ++k;
    if (k < static_cast<std::size_t>(opt.first_test)) continue;

    std::vector<Cost> costs;
    for (auto idx : alive) costs.push_back(aggregate_cost(metric, pooled(pool[idx], k)));
    std::size_t best = 0;
    for (std::size_t i = 1; i < alive.size(); ++i)
      if (better(costs[i], costs[best])) best = i;
    const auto best_samples = race_samples(metric, pooled(pool[alive[best]], k));
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (i != best && better(costs[best], costs[i])) {
        const auto samples = race_samples(metric, pooled(pool[alive[i]], k));
        if (mann_whitney_u(samples, best_samples).p < opt.alpha) continue;
      }
      keep.push_back(alive[i]);
    }
    alive = std::move(keep);
  }

  // Rank on the instances every survivor has completed.
  std::size_t common = std::numeric_limits<std::size_t>::max();
  for (auto idx : alive) common = std::min(common, pool[idx].instances.size());
  if (alive.empty()) common = 0;
  std::vector<std::pair<Cost, std::size_t>> ranked;
  for (auto idx : alive) ranked.emplace_back(aggregate_cost(metric, pooled(pool[idx], common)), idx);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return better(a.first, b.first); });
  std::vector<Candidate> out;
  for (const auto& [cost, idx] : ranked) out.push_back(std::move(pool[idx]));
  return {std::move(out), common};
}

// Truncated normal by rejection, falling back to clamping.
double truncated_normal(double mean, double sd, double lo, double hi, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double v = mean + sd * rng.normal();
    if (v >= lo && v <= hi) return v;
  }
  return std::clamp(mean, lo, hi);
}

struct Dispersion {
  double mu, lambda, log_pm, p_c;
};

GAConfig sample_around(const GAConfig& parent, const Dispersion& d, const ParameterSpace& s, Rng& rng) {
  GAConfig c;
  auto discrete = [&](int v, double sd, int lo, int hi) {
    const double x = truncated_normal(v, sd, lo - 0.5, hi + 0.5, rng);
    return std::clamp(static_cast<int>(std::lround(x)), lo, hi);
  };
  c.mu = discrete(parent.mu, d.mu, s.mu_min, s.mu_max);
  c.lambda = discrete(parent.lambda, d.lambda, s.lambda_min, s.lambda_max);
  c.p_m = std::clamp(
      std::exp(truncated_normal(std::log(parent.p_m), d.log_pm, std::log(s.p_m_min), std::log(s.p_m_max), rng)),
      s.p_m_min, s.p_m_max);
  if (c.mu <= 1) c.p_c = 0.0;
  else if (parent.mu > 1) c.p_c = truncated_normal(parent.p_c, d.p_c, s.p_c_min, s.p_c_max, rng);
  else c.p_c = rng.uniform(s.p_c_min, s.p_c_max);
  return c;
}

bool contains_config(const std::vector<Candidate>& pool, const GAConfig& c) {
  return std::any_of(pool.begin(), pool.end(), [&](const Candidate& x) { return x.config == c; });
}

}  // namespace

RaceResult race(std::span<const GAConfig> candidates, const ConfigurationEvaluator& evaluator,
                std::int64_t budget, std::uint64_t seed, const RaceOptions& options) {
  if (candidates.empty()) throw std::invalid_argument("race needs at least one candidate");
  if (budget < 1) throw std::invalid_argument("race needs a positive budget");
  for (const auto& c : candidates)
    if (!c.feasible()) throw std::invalid_argument("race candidate " + c.to_string() + " is infeasible");
  detail::TuneRecorder rec("race", budget, seed);
  std::vector<Candidate> pool;
  for (const auto& c : candidates) pool.push_back({c, {}});
  auto [survivors, common] = run_race(std::move(pool), evaluator, rec, budget, seed, options);
  RaceResult out;
  for (const auto& s : survivors) {
    out.ranking.push_back(s.config);
    out.costs.push_back(aggregate_cost(evaluator.metric(), pooled(s, common)));
  }
  out.instances = static_cast<int>(common);
  auto tr = rec.finish();
  out.target_runs_spent = tr.target_runs_spent;
  out.evaluations = std::move(tr.all_evaluated);
  return out;
}

TuneResult tune_race(const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed,
                     const ParameterSpace& space, const RaceOptions& options) {
  if (budget < 10) throw std::invalid_argument("racing needs a budget of at least 10 target runs");
  if (options.iterations < 1 || options.min_survivors < 1 || options.first_test < 1)
    throw std::invalid_argument("invalid racing options");
  detail::TuneRecorder rec("race", budget, seed);
  Rng rng(seed);
  const std::uint64_t race_seed = derive_seed({seed, 0x72616365ULL});
  const Dispersion initial{(space.mu_max - space.mu_min) / 2.0, (space.lambda_max - space.lambda_min) / 2.0,
                           (std::log(space.p_m_max) - std::log(space.p_m_min)) / 2.0,
                           (space.p_c_max - space.p_c_min) / 2.0};
  Dispersion disp = initial;
  std::vector<Candidate> elites;

  for (int j = 1; rec.has_budget(); ++j) {
    const std::int64_t remaining = budget - rec.spent();
    const std::int64_t share = j >= options.iterations ? remaining : remaining / (options.iterations - j + 1);
    if (share <= 0) continue;
    const auto per_candidate = static_cast<std::int64_t>(options.first_test + std::min(5, j));
    const auto wanted = std::max<std::int64_t>(share / per_candidate, static_cast<std::int64_t>(elites.size()) + 2);

    std::vector<Candidate> pool = elites;
    int attempts = 0;
    while (static_cast<std::int64_t>(pool.size()) < wanted && attempts < 100 * wanted) {
      ++attempts;
      GAConfig c;
      if (elites.empty()) {
        c = detail::sample_uniform(space, rng, true);
      } else {
        // Rank-weighted choice of the parent elite.
        const auto k = elites.size();
        const double total = static_cast<double>(k * (k + 1)) / 2.0;
        double u = rng.uniform01() * total;
        std::size_t parent = 0;
        for (; parent + 1 < k; ++parent) {
          u -= static_cast<double>(k - parent);
          if (u < 0) break;
        }
        c = sample_around(elites[parent].config, disp, space, rng);
      }
      if (!space.feasible(c) || contains_config(pool, c)) continue;
      pool.push_back({c, {}});
    }

    auto [survivors, common] = run_race(std::move(pool), evaluator, rec, share, race_seed, options);
    (void)common;
    if (survivors.size() > static_cast<std::size_t>(options.min_survivors))
      survivors.resize(static_cast<std::size_t>(options.min_survivors));
    elites = std::move(survivors);
    disp = {std::max(0.5, disp.mu / 2), std::max(0.5, disp.lambda / 2), std::max(1e-3, disp.log_pm / 2),
            std::max(1e-3, disp.p_c / 2)};
  }

  auto result = rec.finish();
  result.tuner = "race";
  if (!elites.empty()) {
    std::size_t common = std::numeric_limits<std::size_t>::max();
    for (const auto& e : elites) common = std::min(common, e.instances.size());
    result.best_config = elites.front().config;
    result.best_cost = aggregate_cost(evaluator.metric(), pooled(elites.front(), common));
    for (const auto& e : elites) result.elites.push_back(e.config);
  }
  return result;
}

}  // namespace gacfg
