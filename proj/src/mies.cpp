#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "gacfg/tuner.hpp"
#include "tuner_internal.hpp"

namespace gacfg {

namespace {

// Object variables: integers (mu, lambda) and reals (p_m, p_c), each with
// its own step size.
struct Individual {
  std::array<int, 2> z{};
  std::array<double, 2> r{};
  std::array<double, 2> int_step{};
  std::array<double, 2> real_step{};
  Cost cost;

  GAConfig config() const { return {z[0], z[1], r[0], r[1]}; }
};

constexpr double kIntegerVars = 2.0;
// Learning rates for n = 4 object variables in total.
const double kTauGlobal = 1.0 / std::sqrt(2.0 * 4.0);
const double kTauLocal = 1.0 / std::sqrt(2.0 * std::sqrt(4.0));

// Difference of two geometric variates with mean step `step` per variable.
int geometric_difference(double step, Rng& rng) {
  const double s = step / kIntegerVars;
  const double p = s / (1.0 + std::sqrt(1.0 + s * s));
  auto geometric = [&] {
    const double u = rng.uniform01();
    return static_cast<int>(std::floor(std::log1p(-u) / std::log1p(-p)));
  };
  const int g1 = geometric();
  const int g2 = geometric();
  return g1 - g2;
}

class Mies {
 public:
  Mies(const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed,
       const ParameterSpace& space, const MiesOptions& options)
      : evaluator_(evaluator), space_(space), options_(options), rng_(seed), rec_("mies", budget, seed) {}

  TuneResult run() {
    std::vector<Individual> parents;
    for (int i = 0; i < options_.parents; ++i) {
      Individual ind = random_individual();
      if (!score(ind)) return finish(parents);
      parents.push_back(ind);
    }
    int idle = 0;
    while (rec_.has_budget() && idle < options_.max_idle_generations) {
      std::vector<Individual> offspring;
      offspring.reserve(static_cast<std::size_t>(options_.offspring));
      const auto spent_before = rec_.spent();
      bool complete = true;
      for (int k = 0; k < options_.offspring; ++k) {
        Individual child = mutate(recombine(parents));
        if (!score(child)) {
          complete = false;
          break;
        }
        offspring.push_back(child);
      }
      if (!complete) break;
      idle = rec_.spent() == spent_before ? idle + 1 : 0;
      std::stable_sort(offspring.begin(), offspring.end(),
                       [](const Individual& a, const Individual& b) { return better(a.cost, b.cost); });
      offspring.resize(static_cast<std::size_t>(options_.parents));
      parents = std::move(offspring);
    }
    return finish(parents);
  }

 private:
  Individual random_individual() {
    Individual ind;
    ind.z[0] = static_cast<int>(rng_.uniform_int(space_.mu_min, space_.mu_max));
    ind.z[1] = static_cast<int>(rng_.uniform_int(space_.lambda_min, space_.lambda_max));
    ind.r[0] = rng_.uniform(space_.p_m_min, space_.p_m_max);
    ind.r[1] = rng_.uniform(space_.p_c_min, space_.p_c_max);
    ind.int_step = {2.0, 2.0};
    ind.real_step = {0.1 * (space_.p_m_max - space_.p_m_min), 0.1 * (space_.p_c_max - space_.p_c_min)};
    return ind;
  }

  // Discrete recombination of object variables, intermediate of step sizes.
  Individual recombine(const std::vector<Individual>& parents) {
    const auto& a = parents[rng_.below(parents.size())];
    const auto& b = parents[rng_.below(parents.size())];
    Individual child;
    for (std::size_t i = 0; i < 2; ++i) {
      child.z[i] = rng_.bernoulli(0.5) ? a.z[i] : b.z[i];
      child.r[i] = rng_.bernoulli(0.5) ? a.r[i] : b.r[i];
      child.int_step[i] = 0.5 * (a.int_step[i] + b.int_step[i]);
      child.real_step[i] = 0.5 * (a.real_step[i] + b.real_step[i]);
    }
    return child;
  }

  Individual mutate(Individual ind) {
    const double global = kTauGlobal * rng_.normal();
    const std::array<int, 2> zlo = {space_.mu_min, space_.lambda_min};
    const std::array<int, 2> zhi = {space_.mu_max, space_.lambda_max};
    const std::array<double, 2> rlo = {space_.p_m_min, space_.p_c_min};
    const std::array<double, 2> rhi = {space_.p_m_max, space_.p_c_max};
    for (std::size_t i = 0; i < 2; ++i) {
      ind.real_step[i] *= std::exp(global + kTauLocal * rng_.normal());
      ind.r[i] = std::clamp(ind.r[i] + ind.real_step[i] * rng_.normal(), rlo[i], rhi[i]);
    }
    for (std::size_t i = 0; i < 2; ++i) {
      ind.int_step[i] = std::max(1.0, ind.int_step[i] * std::exp(global + kTauLocal * rng_.normal()));
      ind.z[i] = std::clamp(ind.z[i] + geometric_difference(ind.int_step[i], rng_), zlo[i], zhi[i]);
    }
    return ind;
  }

  // Returns false when a feasible individual cannot be paid for.
  bool score(Individual& ind) {
    const GAConfig c = ind.config();
    if (!space_.feasible(c)) {
      ind.cost = Cost::infeasible();
      rec_.record_infeasible(c);
      return true;
    }
    if (!rec_.has_budget()) return false;
    ind.cost = rec_.evaluate(evaluator_, c, rng_.next_seed()).cost;
    return true;
  }

  TuneResult finish(std::vector<Individual> parents) {
    std::stable_sort(parents.begin(), parents.end(),
                     [](const Individual& a, const Individual& b) { return better(a.cost, b.cost); });
    auto result = rec_.finish();
    for (const auto& p : parents)
      if (p.cost.kind != Cost::Kind::infeasible) result.elites.push_back(p.config());
    return result;
  }

  const ConfigurationEvaluator& evaluator_;
  ParameterSpace space_;
  MiesOptions options_;
  Rng rng_;
  detail::TuneRecorder rec_;
};

}  // namespace

TuneResult tune_mies(const ConfigurationEvaluator& evaluator, std::int64_t budget, std::uint64_t seed,
                     const ParameterSpace& space, const MiesOptions& options) {
  if (options.parents < 1 || options.offspring < options.parents)
    throw std::invalid_argument("MIES needs 1 <= parents <= offspring");
  if (budget < options.parents + options.offspring)
    throw std::invalid_argument("MIES budget must cover the initial parents and one generation (" +
                                std::to_string(options.parents + options.offspring) + " target runs)");
  return Mies(evaluator, budget, seed, space, options).run();
}

}  // namespace gacfg
