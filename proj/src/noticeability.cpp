#include "structack/noticeability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace structack {

namespace {

// Max |i_a·n_b − i_b·n_a| over the merged order, divided once at the end,
// so the statistic is an exact ratio of integers.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::int64_t na = static_cast<std::int64_t>(a.size());
  const std::int64_t nb = static_cast<std::int64_t>(b.size());
  std::size_t ia = 0, ib = 0;
  std::int64_t worst = 0;
  while (ia < a.size() || ib < b.size()) {
    const double x = (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib])) ? a[ia] : b[ib];
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    const std::int64_t gap = static_cast<std::int64_t>(ia) * nb - static_cast<std::int64_t>(ib) * na;
    worst = std::max(worst, gap < 0 ? -gap : gap);
  }
  return static_cast<double>(worst) / (static_cast<double>(na) * static_cast<double>(nb));
}

double kolmogorov_p_value(double statistic, std::int64_t na, std::int64_t nb) {
  if (statistic <= 0.0) return 1.0;
  const double effective = static_cast<double>(na) * nb / (static_cast<double>(na) + nb);
  const double z = std::sqrt(effective) * statistic;
  // Below z ≈ 1e-4 the survival probability is 1 to double precision.
  if (z < 1e-4) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100000; ++j) {
    const double term = std::exp(-2.0 * j * j * z * z);
    if (term < 1e-12) break;
    sum += sign * term;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  KsResult result;
  result.statistic = ks_statistic({a.begin(), a.end()}, {b.begin(), b.end()});
  result.p_value = kolmogorov_p_value(result.statistic, static_cast<std::int64_t>(a.size()),
                                      static_cast<std::int64_t>(b.size()));
  return result;
}

NoticeabilityVerdict is_unnoticeable(const Graph& clean, const Graph& perturbed, double alpha) {
  if (clean.node_count() != perturbed.node_count())
    throw std::invalid_argument("is_unnoticeable: node-count mismatch");
  NoticeabilityVerdict verdict;
  verdict.alpha = alpha;

  const std::vector<int> deg_clean = degree_sequence(clean);
  const std::vector<int> deg_pert = degree_sequence(perturbed);
  std::vector<double> a(deg_clean.begin(), deg_clean.end());
  std::vector<double> b(deg_pert.begin(), deg_pert.end());
  verdict.degree = ks_two_sample(a, b);

  verdict.clustering =
      ks_two_sample(local_clustering_coefficients(clean), local_clustering_coefficients(perturbed));

  verdict.unnoticeable = verdict.degree.p_value >= alpha && verdict.clustering.p_value >= alpha;
  return verdict;
}

CriticalRateResult critical_rate(const Graph& clean,
                                 const std::function<Graph(double)>& perturbed_at_rate,
                                 std::span<const double> rates, double alpha) {
  if (!std::is_sorted(rates.begin(), rates.end()))
    throw std::invalid_argument("critical_rate: rates must be ascending");
  CriticalRateResult result;
  for (const double rate : rates) {
    Graph perturbed;
    try {
      perturbed = perturbed_at_rate(rate);
    } catch (const std::exception& e) {
      throw std::runtime_error("critical_rate: attack failed at rate " + std::to_string(rate) +
                               ": " + e.what());
    }
    const NoticeabilityVerdict verdict = is_unnoticeable(clean, perturbed, alpha);
    result.rates.push_back(rate);
    result.verdicts.push_back(verdict);
    if (verdict.unnoticeable) result.critical_rate = std::max(result.critical_rate, rate);
  }
  return result;
}

std::span<const double> default_rate_grid() {
  static const double grid[] = {0.001, 0.002, 0.003, 0.004, 0.005, 0.0075, 0.01,
                                0.025, 0.05,  0.075, 0.10,  0.15,  0.20};
  return grid;
}

}  // namespace structack
