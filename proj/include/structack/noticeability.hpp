// noticeability.hpp — decides whether a perturbed graph is statistically
// distinguishable from the clean one: two-sample KS tests on the degree
// and local clustering coefficient distributions, and the critical-rate
// sweep that finds the largest rate still passing both.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "structack/graph.hpp"

namespace structack {

struct KsResult {
  double statistic = 0.0;  // sup |ECDF_a - ECDF_b|
  double p_value = 1.0;    // asymptotic Kolmogorov distribution
};

// Exact D over the merged sorted values; p from the asymptotic series
// 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² n_e D²) with n_e = n_a n_b/(n_a+n_b),
// truncated when terms drop below 1e-12 and clamped to [0, 1].
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct NoticeabilityVerdict {
  KsResult degree;
  KsResult clustering;
  double alpha = 0.05;
  bool unnoticeable = true;  // both null hypotheses not rejected
};

NoticeabilityVerdict is_unnoticeable(const Graph& clean, const Graph& perturbed,
                                     double alpha = 0.05);

struct CriticalRateResult {
  std::vector<double> rates;
  std::vector<NoticeabilityVerdict> verdicts;
  double critical_rate = 0.0;  // largest unnoticeable rate, 0 if none
};

// Applies the perturbation at every rate (no early stop; the verdict
// sequence need not be monotone). A factory failure is rethrown with the
// offending rate attached.
CriticalRateResult critical_rate(const Graph& clean,
                                 const std::function<Graph(double)>& perturbed_at_rate,
                                 std::span<const double> rates, double alpha = 0.05);

// Rate grid used throughout the result tables.
std::span<const double> default_rate_grid();

}  // namespace structack
