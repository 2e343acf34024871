#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gacfg/metrics.hpp"

namespace gacfg {

struct MannWhitney {
  double u;  ///< U statistic of the first sample
  double p;  ///< two-sided p-value
};

/// Largest per-sample size for which the exact permutation distribution is
/// enumerated; larger samples use the tie-corrected normal approximation.
inline constexpr std::size_t kExactMannWhitneyLimit = 8;

/// Two-sided Mann-Whitney U test with midranks. Throws std::invalid_argument
/// for an empty sample.
MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Benjamini-Hochberg step-up adjustment, clipped to 1 and returned in input
/// order. Throws std::invalid_argument for values outside [0, 1].
std::vector<double> bh_adjust(std::span<const double> p_values);

struct Comparison {
  std::vector<double> sample_a;
  std::vector<double> sample_b;
  double u_statistic = 0.0;
  double p_value = 1.0;
  double adjusted_p = 1.0;
};

/// Runs one test per pair and adjusts all p-values as one family.
std::vector<Comparison> compare_family(std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs);

/// (ERT_ea - ERT) / ERT_ea. An infinite ERT gives -infinity, an infinite
/// baseline with a finite ERT gives +infinity, and nullopt is returned when
/// both are infinite. Throws std::invalid_argument for a non-positive
/// finite baseline.
std::optional<double> relative_improvement_ert(const Ert& baseline, const Ert& value);

/// (AUC - AUC_ea) / AUC_ea as a fraction (multiply by 100 for percent).
/// Throws std::invalid_argument unless auc_ea > 0.
double relative_improvement_auc(double auc_ea, double auc);

/// (ERT_usingERT - ERT_usingAUC) / ERT_usingAUC clamped to [-1, 1]. An
/// infinite numerator maps to 1, an infinite denominator to -1, and two
/// infinite values to 0.
double relative_ert_across_metrics(const Ert& using_ert, const Ert& using_auc);

/// "*" below 0.05, "**" below 0.01, "***" below 0.001, "****" below 0.0001.
std::string stars(double adjusted_p);

}  // namespace gacfg
