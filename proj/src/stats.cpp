#include "gacfg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gacfg {

namespace {

// Midranks (1-based) of the pooled sample.
std::vector<double> midranks(const std::vector<double>& pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(pooled.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

// Visits every size-k subset of {0..n-1} and reports the rank sum.
template <class Fn>
void for_each_rank_sum(const std::vector<double>& ranks, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t n = ranks.size();
  for (;;) {
    double sum = 0.0;
    for (auto i : idx) sum += ranks[i];
    fn(sum);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t q = pos; q < k; ++q) idx[q] = idx[q - 1] + 1;
  }
}

}  // namespace

MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Mann-Whitney test needs two nonempty samples");
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  const double u = rank_sum_a - na * (na + 1.0) / 2.0;
  const double mean = na * nb / 2.0;

  if (std::max(a.size(), b.size()) <= kExactMannWhitneyLimit) {
    // Permutation distribution of U given the observed ties.
    const double observed = std::abs(u - mean);
    const double tol = 1e-9;
    std::size_t extreme = 0, total = 0;
    for_each_rank_sum(ranks, a.size(), [&](double s) {
      ++total;
      if (std::abs(s - na * (na + 1.0) / 2.0 - mean) >= observed - tol) ++extreme;
    });
    return {u, std::min(1.0, static_cast<double>(extreme) / static_cast<double>(total))};
  }

  // Normal approximation with tie and continuity correction.
  const double n = na + nb;
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) return {u, 1.0};
  const double diff = std::max(0.0, std::abs(u - mean) - 0.5);
  const double z = diff / std::sqrt(variance);
  return {u, std::min(1.0, std::erfc(z / std::sqrt(2.0)))};
}

std::vector<double> bh_adjust(std::span<const double> p_values) {
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return p_values[i] < p_values[j]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t r = m; r > 0; --r) {
    const std::size_t i = order[r - 1];
    running = std::min(running, p_values[i] * (static_cast<double>(m) / static_cast<double>(r)));
    adjusted[i] = std::min(1.0, running);
  }
  return adjusted;
}

std::vector<Comparison> compare_family(std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs) {
  std::vector<Comparison> out;
  out.reserve(pairs.size());
  std::vector<double> ps;
  for (auto& [a, b] : pairs) {
    const auto r = mann_whitney_u(a, b);
    out.push_back({std::move(a), std::move(b), r.u, r.p, r.p});
    ps.push_back(r.p);
  }
  const auto adj = bh_adjust(ps);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].adjusted_p = adj[i];
  return out;
}

std::optional<double> relative_improvement_ert(const Ert& baseline, const Ert& value) {
  if (!baseline.finite()) {
    if (!value.finite()) return std::nullopt;
    return HUGE_VAL;
  }
  if (!(baseline.value() > 0.0)) throw std::invalid_argument("baseline ERT must be positive");
  if (!value.finite()) return -HUGE_VAL;
  return (baseline.value() - value.value()) / baseline.value();
}

double relative_improvement_auc(double auc_ea, double auc) {
  if (!(auc_ea > 0.0)) throw std::invalid_argument("baseline AUC must be positive");
  return (auc - auc_ea) / auc_ea;
}

double relative_ert_across_metrics(const Ert& using_ert, const Ert& using_auc) {
  if (!using_ert.finite() && !using_auc.finite()) return 0.0;
  if (!using_ert.finite()) return 1.0;
  if (!using_auc.finite()) return -1.0;
  const double r = (using_ert.value() - using_auc.value()) / using_auc.value();
  return std::clamp(r, -1.0, 1.0);
}

std::string stars(double adjusted_p) {
  if (adjusted_p < 0.0001) return "****";
  if (adjusted_p < 0.001) return "***";
  if (adjusted_p < 0.01) return "**";
  if (adjusted_p < 0.05) return "*";
  return "";
}

}  // namespace gacfg
