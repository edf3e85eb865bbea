#include "chaoslim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "chaoslim/errors.hpp"

namespace chaoslim {

MomentSummary summarize(std::span<const double> x) {
  MomentSummary s;
  s.n = x.size();
  if (s.n < 2) throw InputError("need at least two samples");
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d = (v - s.mean) * (v - s.mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  s.variance = m2 * n / (n - 1.0);
  s.se_mean = std::sqrt(s.variance / n);
  s.se_variance = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return s;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 100) throw InputError("KS statistic needs at least 100 samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_point_mass(std::span<const double> samples, double c) {
  if (samples.empty()) throw InputError("no samples");
  std::size_t below = 0;
  std::size_t above = 0;
  for (double v : samples) {
    below += v < c;
    above += v > c;
  }
  const double n = static_cast<double>(samples.size());
  return std::max(static_cast<double>(below), static_cast<double>(above)) / n;
}

namespace {

double weighted_ks(std::vector<std::pair<double, double>> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double wa = 0.0;
  for (const auto& p : a) wa += p.second;
  if (!(wa > 0.0) || b.empty()) throw InputError("empty sample");
  const double wb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    const double x = (j == b.size() || (i < a.size() && a[i].first <= b[j]))
                         ? a[i].first
                         : b[j];
    while (i < a.size() && a[i].first == x) fa += a[i++].second / wa;
    while (j < b.size() && b[j] == x) {
      fb += 1.0 / wb;
      ++j;
    }
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

}  // namespace

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<std::pair<double, double>> wa;
  wa.reserve(a.size());
  for (double v : a) wa.emplace_back(v, 1.0);
  return weighted_ks(std::move(wa), std::vector<double>(b.begin(), b.end()));
}

double ks_two_sample_weighted(std::span<const double> a, std::span<const double> weights,
                              std::span<const double> b) {
  if (a.size() != weights.size()) throw InputError("weights do not match the sample");
  std::vector<std::pair<double, double>> wa;
  wa.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (weights[i] < 0.0) throw InputError("negative weight");
    wa.emplace_back(a[i], weights[i]);
  }
  return weighted_ks(std::move(wa), std::vector<double>(b.begin(), b.end()));
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0;
  double s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  if (!(s2 > 0.0)) throw InputError("all weights vanish");
  return s * s / s2;
}

double ks_critical_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

double normal_two_sided_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<>(), 0.5 + 0.5 * level);
}

TrendCheck nonincreasing_trend(std::span<const double> values, std::span<const double> se) {
  if (values.size() != se.size()) throw InputError("values and errors differ in length");
  TrendCheck t{true, 0};
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double rise = values[i + 1] - values[i];
    if (rise <= 0.0) continue;
    ++t.inversions;
    if (rise > std::hypot(se[i], se[i + 1])) t.holds = false;
  }
  if (t.inversions > 1) t.holds = false;
  return t;
}

}  // namespace chaoslim
