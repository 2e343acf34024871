#include "gacfg/ga.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gacfg/parallel.hpp"

namespace gacfg {

void GAConfig::validate() const {
  if (mu < 1) throw std::invalid_argument("mu must be at least 1");
  if (lambda < 1) throw std::invalid_argument("lambda must be at least 1");
  if (!(p_m > 0.0 && p_m < 1.0)) throw std::invalid_argument("mutation rate must lie in (0, 1)");
  if (!(p_c >= 0.0 && p_c <= 1.0)) throw std::invalid_argument("crossover probability must lie in [0, 1]");
  if (!feasible()) throw std::invalid_argument("infeasible configuration " + to_string() + ": p_c > 0 requires mu > 1");
}

std::string GAConfig::to_string() const {
  std::ostringstream os;
  os << '(' << mu << ", " << lambda << ", " << p_m << ", " << p_c << ')';
  return os.str();
}

GAConfig one_plus_one_ea(int dimension) { return GAConfig{1, 1, 1.0 / dimension, 0.0}; }

std::uint64_t config_digest(const GAConfig& config) {
  return derive_seed({static_cast<std::uint64_t>(config.mu), static_cast<std::uint64_t>(config.lambda),
                      std::bit_cast<std::uint64_t>(config.p_m), std::bit_cast<std::uint64_t>(config.p_c)});
}

std::optional<std::int64_t> RunLog::hitting_time_for(double target) const {
  const auto it = std::lower_bound(improvements.begin(), improvements.end(), target,
                                   [](const Improvement& imp, double t) { return imp.best_so_far < t; });
  if (it == improvements.end()) return std::nullopt;
  return it->evaluation;
}

double RunLog::best() const {
  return improvements.empty() ? -std::numeric_limits<double>::infinity() : improvements.back().best_so_far;
}

double RunLog::best_at(std::int64_t evaluations) const {
  const auto it = std::upper_bound(improvements.begin(), improvements.end(), evaluations,
                                   [](std::int64_t t, const Improvement& imp) { return t < imp.evaluation; });
  if (it == improvements.begin()) return -std::numeric_limits<double>::infinity();
  return std::prev(it)->best_so_far;
}

MutationStrengthSampler::MutationStrengthSampler(int n, double p_m) : n_(n) {
  if (n < 1) throw std::invalid_argument("mutation strength needs n >= 1");
  if (!(p_m > 0.0 && p_m < 1.0)) throw std::invalid_argument("mutation rate must lie in (0, 1)");
  // log of 1 - (1 - p)^n, the mass of the positive outcomes.
  const double log_positive = std::log(-std::expm1(n * std::log1p(-p_m)));
  pmf_.resize(static_cast<std::size_t>(n));
  cdf_.resize(static_cast<std::size_t>(n));
  double acc = 0.0;
  double log_choose = 0.0;  // log C(n, k), built incrementally (lgamma is not thread-safe)
  for (int k = 1; k <= n; ++k) {
    log_choose += std::log(static_cast<double>(n - k + 1) / k);
    const double log_pk = log_choose + k * std::log(p_m) + (n - k) * std::log1p(-p_m) - log_positive;
    pmf_[static_cast<std::size_t>(k - 1)] = std::exp(log_pk);
    acc += pmf_[static_cast<std::size_t>(k - 1)];
    cdf_[static_cast<std::size_t>(k - 1)] = acc;
  }
  cdf_.back() = std::max(cdf_.back(), 1.0);
}

int MutationStrengthSampler::operator()(Rng& rng) const {
  const double u = rng.uniform01() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<int>(it - cdf_.begin()) + 1, n_);
}

double MutationStrengthSampler::pmf(int k) const {
  if (k < 1 || k > n_) return 0.0;
  return pmf_[static_cast<std::size_t>(k - 1)];
}

int sample_mutation_strength(int n, double p_m, Rng& rng) { return MutationStrengthSampler(n, p_m)(rng); }

namespace {

// Flips `strength` distinct positions chosen by a partial Fisher-Yates pass
// over `order`. Any arrangement of `order` yields a uniform subset.
void flip_positions(std::span<std::uint8_t> bits, std::vector<int>& order, int strength, Rng& rng) {
  const auto n = order.size();
  for (int k = 0; k < strength; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(order[i], order[j]);
    bits[static_cast<std::size_t>(order[i])] ^= 1;
  }
}

void crossover_into(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, std::span<std::uint8_t> out,
                    Rng& rng) {
  const std::size_t n = out.size();
  for (std::size_t base = 0; base < n; base += 64) {
    const std::uint64_t word = rng();
    const std::size_t end = std::min(n, base + 64);
    for (std::size_t i = base; i < end; ++i) {
      const auto take_x = static_cast<std::uint8_t>((word >> (i - base)) & 1U);
      out[i] = static_cast<std::uint8_t>(y[i] ^ ((x[i] ^ y[i]) & take_x));
    }
  }
}

}  // namespace

BitString standard_bit_mutation(const BitString& x, int strength, Rng& rng) {
  if (strength < 1 || static_cast<std::size_t>(strength) > x.size())
    throw std::invalid_argument("mutation strength must lie in 1..n");
  BitString out = x;
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  flip_positions(out.mutable_view(), order, strength, rng);
  return out;
}

BitString uniform_crossover(const BitString& x, const BitString& y, Rng& rng) {
  if (x.size() != y.size()) throw std::invalid_argument("crossover parents differ in length");
  BitString out(x.size());
  crossover_into(x.view(), y.view(), out.mutable_view(), rng);
  return out;
}

namespace {

struct Individual {
  BitString x;
  double fitness = 0.0;
};

class GaRun {
 public:
  GaRun(const GAConfig& config, const Problem& problem, const RunBudget& budget, std::uint64_t seed,
        const RunOptions& options)
      : config_(config),
        problem_(problem),
        budget_(budget),
        rng_(seed),
        sampler_(problem.dimension(), config.p_m),
        counters_(options.counters),
        on_generation_(options.on_generation) {
    log_.seed = seed;
    order_.resize(static_cast<std::size_t>(problem.dimension()));
    std::iota(order_.begin(), order_.end(), 0);
  }

  RunLog run(const std::vector<BitString>& initial) {
    const auto n = static_cast<std::size_t>(problem_.dimension());
    const auto mu = static_cast<std::size_t>(config_.mu);
    const auto lambda = static_cast<std::size_t>(config_.lambda);

    parents_.resize(mu);
    for (std::size_t i = 0; i < mu; ++i) {
      parents_[i].x = initial.empty() ? BitString::random(n, rng_) : initial[i];
      if (!evaluate(parents_[i])) return finish();
    }

    offspring_.resize(lambda);
    for (auto& o : offspring_) o.x = BitString(n);
    pool_.resize(mu + lambda);

    for (;;) {
      if (stalled()) return finish();
      if (counters_) ++counters_->generations;
      for (auto& child : offspring_) {
        if (rng_.uniform01() < config_.p_c) {
          if (counters_) ++counters_->crossovers;
          const auto& a = parents_[rng_.below(mu)];
          const auto& b = parents_[rng_.below(mu)];
          crossover_into(a.x.view(), b.x.view(), child.x.mutable_view(), rng_);
          if (child.x == a.x || child.x == b.x) {
            if (counters_) ++counters_->inferred_crossovers;
            child.fitness = child.x == a.x ? a.fitness : b.fitness;
            continue;
          }
        } else {
          if (counters_) ++counters_->mutations;
          const auto& parent = parents_[rng_.below(mu)];
          child.x = parent.x;
          flip_positions(child.x.mutable_view(), order_, sampler_(rng_), rng_);
          if (child.x == parent.x) {
            if (counters_) ++counters_->inferred_mutations;
            child.fitness = parent.fitness;
            continue;
          }
        }
        if (!evaluate(child)) return finish();
      }
      select();
      if (on_generation_) {
        fitness_view_.resize(parents_.size());
        for (std::size_t i = 0; i < parents_.size(); ++i) fitness_view_[i] = parents_[i].fitness;
        on_generation_(fitness_view_);
      }
    }
  }

 private:
  // Evaluates one individual. Returns false when the run must stop, either
  // because the cutoff leaves no room or because the target was reached.
  bool evaluate(Individual& ind) {
    if (log_.total_evaluations >= budget_.cutoff) return false;
    ind.fitness = problem_.evaluate(ind.x.view());
    ++log_.total_evaluations;
    if (counters_) ++counters_->evaluations;
    if (log_.improvements.empty() || ind.fitness > log_.improvements.back().best_so_far) {
      log_.improvements.push_back({log_.total_evaluations, ind.fitness});
      if (ind.fitness >= budget_.target) {
        log_.hitting_time = log_.total_evaluations;
        return false;
      }
    }
    return log_.total_evaluations < budget_.cutoff;
  }

  // Plus selection: random shuffle then stable sort, so equal fitness values
  // are ordered uniformly at random.
  void select() {
    const std::size_t mu = parents_.size();
    std::size_t k = 0;
    for (auto& p : parents_) pool_[k++] = std::move(p);
    for (auto& o : offspring_) pool_[k++] = std::move(o);
    rng_.shuffle(std::span(pool_));
    std::stable_sort(pool_.begin(), pool_.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; });
    for (std::size_t i = 0; i < mu; ++i) parents_[i] = std::move(pool_[i]);
    for (std::size_t i = 0; i < offspring_.size(); ++i) offspring_[i] = std::move(pool_[mu + i]);
  }

  // With p_c = 1 and identical parents every offspring is a copy whose
  // fitness is inferred, so no evaluation would ever happen again.
  bool stalled() const {
    if (config_.p_c < 1.0) return false;
    for (const auto& p : parents_)
      if (!(p.x == parents_.front().x)) return false;
    return true;
  }

  RunLog finish() { return std::move(log_); }

  const GAConfig& config_;
  const Problem& problem_;
  RunBudget budget_;
  Rng rng_;
  MutationStrengthSampler sampler_;
  RunCounters* counters_;
  const std::function<void(std::span<const double>)>& on_generation_;
  std::vector<double> fitness_view_;
  RunLog log_;
  std::vector<int> order_;
  std::vector<Individual> parents_;
  std::vector<Individual> offspring_;
  std::vector<Individual> pool_;
};

}  // namespace

RunLog run_ga(const GAConfig& config, const Problem& problem, const RunBudget& budget, std::uint64_t seed,
              const RunOptions& options) {
  config.validate();
  if (!options.initial_population.empty()) {
    if (options.initial_population.size() != static_cast<std::size_t>(config.mu))
      throw std::invalid_argument("initial population must hold mu individuals");
    for (const auto& x : options.initial_population)
      if (x.size() != static_cast<std::size_t>(problem.dimension()))
        throw std::invalid_argument("initial individual has the wrong length");
  }
  GaRun run(config, problem, budget, seed, options);
  return run.run(options.initial_population);
}

std::vector<RunLog> run_many(const GAConfig& config, const Problem& problem, const RunBudget& budget,
                             std::span<const std::uint64_t> seeds, unsigned threads) {
  config.validate();
  std::vector<RunLog> logs(seeds.size());
  parallel_for(
      seeds.size(), [&](std::size_t i) { logs[i] = run_ga(config, problem, budget, seeds[i]); }, threads);
  return logs;
}

}  // namespace gacfg
