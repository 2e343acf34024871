#pragma once

#include <optional>
#include <string>

#include "gacfg/tuner.hpp"

namespace gacfg::detail {

// Budget accounting, evaluation log and best-so-far trajectory shared by
// all tuners.
class TuneRecorder {
 public:
  TuneRecorder(std::string tuner, std::int64_t budget, std::uint64_t seed);

  bool has_budget() const noexcept { return spent_ < budget_; }
  std::int64_t spent() const noexcept { return spent_; }
  std::int64_t budget() const noexcept { return budget_; }

  // Runs one target run of a feasible configuration. Throws std::logic_error
  // when the budget is exhausted.
  Evaluation evaluate(const ConfigurationEvaluator& evaluator, const GAConfig& config, std::uint64_t seed);
  // Logs an infeasible configuration without spending budget.
  void record_infeasible(const GAConfig& config);

  const std::optional<Evaluation>& best() const noexcept { return best_; }
  TuneResult finish();

 private:
  TuneResult result_;
  std::int64_t budget_;
  std::int64_t spent_ = 0;
  std::optional<Evaluation> best_;
};

// mu first, then p_c only when mu > 1. p_m uniform on a log scale when
// log_pm is set, otherwise uniform.
GAConfig sample_uniform(const ParameterSpace& space, Rng& rng, bool log_pm);

}  // namespace gacfg::detail
