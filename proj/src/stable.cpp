#include "chaoslim/stable.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chaoslim/errors.hpp"

namespace chaoslim {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kPi = std::numbers::pi;

double cutoff(double a, double alpha) { return std::pow(40.0 / a, 1.0 / alpha); }

template <class F>
double integrate(F f, double lo, double hi, const char* what) {
  double err = 0.0;
  double l1 = 0.0;
  const double v = gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-10, &err, &l1);
  if (!(err <= 1e-10 * std::max(1.0, l1)) || !std::isfinite(v)) {
    throw NumericError(std::string(what) + ": quadrature error estimate " + std::to_string(err) + " of " + std::to_string(l1));
  }
  return v;
}

// ∫_0^hi f(t) dt after t = u², which smooths the t^α cusp at the origin,
// split into panels of about four periods of cos(tx).
template <class F>
double integrate_oscillatory(F f, double hi, double x, const char* what) {
  const auto panels =
      static_cast<std::size_t>(std::max(1.0, std::ceil(hi * std::abs(x) / (8.0 * kPi))));
  const double w = hi / static_cast<double>(panels);
  auto g = [&](double u) { return 2.0 * u * f(u * u); };
  double total = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    total += integrate(g, std::sqrt(w * static_cast<double>(i)),
                       std::sqrt(w * static_cast<double>(i + 1)), what);
  }
  return total;
}

}  // namespace

StableSpec StableSpec::gaussian(double sigma2) {
  StableSpec s;
  s.sigma2 = sigma2;
  s.validate();
  return s;
}

StableSpec StableSpec::stable(double alpha, double gamma, double c) {
  StableSpec s;
  s.alpha = alpha;
  s.gamma = gamma;
  s.c = c;
  s.validate();
  return s;
}

void StableSpec::validate() const {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw InputError("stable index must lie in (1, 2]");
  if (alpha == 2.0 && !(sigma2 > 0.0)) throw InputError("variance must be positive");
  if (alpha < 2.0 && (!(c > 0.0) || !(std::abs(gamma) <= 1.0))) {
    throw InputError("stable law needs C > 0 and |gamma| <= 1");
  }
}

double stable_constant(double alpha) {
  return std::tgamma(1.0 - alpha) * std::cos(kPi * alpha / 2.0);
}

double StableSpec::scale() const { return stable_constant(alpha) * c; }

double stable_density(const StableSpec& spec, double x) {
  spec.validate();
  if (spec.alpha == 2.0) {
    return std::exp(-0.5 * x * x / spec.sigma2) / std::sqrt(2.0 * kPi * spec.sigma2);
  }
  const double a = spec.scale();
  const double al = spec.alpha;
  const double b = a * spec.gamma * std::tan(kPi * al / 2.0);
  const double hi = cutoff(a, al);
  auto f = [&](double t) {
    const double ta = std::pow(t, al);
    return std::exp(-a * ta) * std::cos(b * ta - t * x);
  };
  return integrate_oscillatory(f, hi, x, "stable density") / kPi;
}

double stable_density_t(const StableSpec& spec, double t, double x) {
  if (!(t > 0.0)) throw DomainError("stable transition density needs t > 0");
  const double s = std::pow(t, 1.0 / spec.alpha);
  return stable_density(spec, x / s) / s;
}

double stable_cdf(const StableSpec& spec, double x) {
  spec.validate();
  if (spec.alpha == 2.0) return 0.5 * std::erfc(-x / std::sqrt(2.0 * spec.sigma2));
  const double a = spec.scale();
  const double al = spec.alpha;
  const double b = a * spec.gamma * std::tan(kPi * al / 2.0);
  const double hi = cutoff(a, al);
  // Im[e^{-itx} φ(t)]/t, with the removable singularity at t = 0 handled by
  // the open Kronrod nodes.
  auto f = [&](double t) {
    const double ta = std::pow(t, al);
    return std::exp(-a * ta) * std::sin(b * ta - t * x) / t;
  };
  return 0.5 - integrate_oscillatory(f, hi, x, "stable cdf") / kPi;
}

double stable_l2_norm_sq(const StableSpec& spec) {
  spec.validate();
  if (spec.alpha == 2.0) return 1.0 / (2.0 * std::sqrt(spec.sigma2 * kPi));
  const double al = spec.alpha;
  return std::tgamma(1.0 + 1.0 / al) * std::pow(2.0 * spec.scale(), -1.0 / al) / kPi;
}

StableDensity::StableDensity(StableSpec spec, double half_width, std::size_t points)
    : spec_(spec) {
  spec_.validate();
  if (points < 3 || !(half_width > 0.0)) throw InputError("density table needs >= 3 points");
  x_.resize(points);
  g_.resize(points);
  const double h = 2.0 * half_width / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    x_[i] = -half_width + h * static_cast<double>(i);
    g_[i] = stable_density(spec_, x_[i]);
  }
}

double StableDensity::operator()(double x) const {
  if (x < x_.front() || x > x_.back()) return stable_density(spec_, x);
  const double h = x_[1] - x_[0];
  const double pos = (x - x_.front()) / h;
  const auto i = std::min(static_cast<std::size_t>(pos), x_.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * g_[i] + w * g_[i + 1];
}

double StableDensity::mass() const {
  const double h = x_[1] - x_[0];
  double s = 0.5 * (g_.front() + g_.back());
  for (std::size_t i = 1; i + 1 < g_.size(); ++i) s += g_[i];
  return s * h;
}

}  // namespace chaoslim
