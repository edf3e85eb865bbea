#pragma once

// Kolmogorov–Smirnov statistics, moment summaries and trend checks used by
// the experiment harness.

#include <functional>
#include <span>
#include <vector>

namespace chaoslim {

struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  /// Standard error of the sample variance, √((m₄ − s⁴)/n).
  double se_variance = 0.0;
};

MomentSummary summarize(std::span<const double> x);

/// sup |F_n − F|. Requires at least 100 samples.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// sup |F_n − 1{· ≥ c}|; zero when every sample equals c.
double ks_point_mass(std::span<const double> samples, double c);

/// sup |F_a − F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Same with weights on the first sample (normalized internally).
double ks_two_sample_weighted(std::span<const double> a, std::span<const double> weights,
                              std::span<const double> b);

/// (Σw)²/Σw².
double effective_sample_size(std::span<const double> weights);

/// √(−½ log(α/2)), the asymptotic Kolmogorov critical value.
double ks_critical_coefficient(double alpha);

/// Two-sided standard normal quantile z with P(|Z| ≤ z) = level.
double normal_two_sided_quantile(double level);

struct TrendCheck {
  bool holds;
  std::size_t inversions;
};

/// Nonincreasing up to at most one increase no larger than the combined
/// standard error √(se_i² + se_{i+1}²).
TrendCheck nonincreasing_trend(std::span<const double> values, std::span<const double> se);

}  // namespace chaoslim
