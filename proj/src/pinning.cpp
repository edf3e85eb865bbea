#include "chaoslim/pinning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/zeta.hpp>

#include "chaoslim/dirichlet.hpp"
#include "chaoslim/errors.hpp"
#include "chaoslim/laws.hpp"

namespace chaoslim {

namespace {

std::vector<double> survival_table(const std::vector<double>& jumps) {
  std::vector<double> s(jumps.size() + 1, 0.0);
  double tail = 0.0;
  for (std::size_t n = jumps.size(); n-- > 0;) {
    tail += jumps[n];
    s[n] = tail;
  }
  return s;
}

}  // namespace

RenewalLaw RenewalLaw::from_jumps(std::vector<double> jumps) {
  while (!jumps.empty() && jumps.back() == 0.0) jumps.pop_back();
  if (jumps.empty()) throw InputError("renewal law needs at least one jump");
  double total = 0.0;
  std::size_t g = 0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (!(jumps[i] >= 0.0)) throw InputError("negative jump probability");
    total += jumps[i];
    if (jumps[i] > 0.0) g = std::gcd(g, i + 1);
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("jump probabilities must sum to 1");
  if (g != 1) throw InputError("renewal law must be aperiodic");
  RenewalLaw law;
  law.jumps_ = std::move(jumps);
  law.survival_ = survival_table(law.jumps_);
  return law;
}

RenewalLaw RenewalLaw::alpha_law(double alpha, std::size_t n_max) {
  if (!(alpha > 0.5)) throw DomainError("alpha <= 1/2: kernel is not square integrable");
  if (!(alpha < 1.0)) throw InputError("alpha law requires alpha < 1");
  if (n_max < 2) throw InputError("alpha law needs n_max >= 2");
  const double l = 1.0 / boost::math::zeta(1.0 + alpha);
  std::vector<double> jumps(n_max);
  double head = 0.0;
  for (std::size_t n = 1; n < n_max; ++n) {
    jumps[n - 1] = l * std::pow(static_cast<double>(n), -1.0 - alpha);
    head += jumps[n - 1];
  }
  jumps[n_max - 1] = 1.0 - head;
  RenewalLaw law;
  law.jumps_ = std::move(jumps);
  law.survival_ = survival_table(law.jumps_);
  law.regime_ = Regime::alpha;
  law.alpha_ = alpha;
  law.l_ = l;
  return law;
}

double RenewalLaw::jump(std::size_t n) const {
  return (n == 0 || n > jumps_.size()) ? 0.0 : jumps_[n - 1];
}

double RenewalLaw::survival(std::size_t n) const {
  return n < survival_.size() ? survival_[n] : 0.0;
}

double RenewalLaw::mean() const {
  if (regime_ != Regime::finite_mean) throw InputError("alpha-regime law has infinite mean");
  double m = 0.0;
  for (std::size_t n = 1; n <= jumps_.size(); ++n) m += static_cast<double>(n) * jumps_[n - 1];
  return m;
}

std::vector<double> renewal_mass(const RenewalLaw& law, std::size_t n) {
  std::vector<double> u(n + 1, 0.0);
  u[0] = 1.0;
  const std::size_t top = law.n_max();
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0;
    const std::size_t lim = std::min(k, top);
    for (std::size_t m = 1; m <= lim; ++m) s += law.jump(m) * u[k - m];
    u[k] = s;
  }
  return u;
}

double alpha_constant(double alpha) { return alpha * std::sin(std::numbers::pi * alpha) / std::numbers::pi; }

double coupling_scale(const RenewalLaw& law, std::size_t n) {
  if (n == 0) throw InputError("system size must be positive");
  const double nn = static_cast<double>(n);
  if (law.regime() == Regime::finite_mean) return 1.0 / std::sqrt(nn);
  return law.slowly_varying() * std::pow(nn, 0.5 - law.alpha());
}

Couplings scale_couplings(const RenewalLaw& law, double beta_hat, double h_hat, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double a = coupling_scale(law, n);
  if (law.regime() == Regime::finite_mean) return {beta_hat * a, h_hat / nn};
  return {beta_hat * a, h_hat * law.slowly_varying() * std::pow(nn, -law.alpha())};
}

PinningSystem::PinningSystem(RenewalLaw law, std::size_t n)
    : law_(std::move(law)), n_(n), u_(renewal_mass(law_, n)) {}

double PinningSystem::partition(std::span<const double> omega, double beta, double lambda_beta,
                                double h, PinMode mode) const {
  if (omega.size() < n_) throw InputError("disorder shorter than system size");
  if (mode == PinMode::conditioned && !(u_[n_] > 0.0)) {
    throw ConditioningError("u(N) = 0: conditioning on a null event");
  }
  std::vector<double> z(n_ + 1, 0.0);
  z[0] = 1.0;
  const std::size_t top = law_.n_max();
  for (std::size_t k = 1; k <= n_; ++k) {
    double s = 0.0;
    const std::size_t lim = std::min(k, top);
    for (std::size_t m = 1; m <= lim; ++m) s += z[k - m] * law_.jump(m);
    z[k] = s * std::exp(beta * omega[k - 1] - lambda_beta + h);
  }
  if (mode == PinMode::conditioned) return z[n_] / u_[n_];
  double total = 0.0;
  for (std::size_t k = 0; k <= n_; ++k) total += z[k] * law_.survival(n_ - k);
  return total;
}

double partition_function(const RenewalLaw& law, const DisorderLaw& disorder,
                          std::span<const double> omega, double beta, double h, PinMode mode) {
  return PinningSystem(law, omega.size()).partition(omega, beta, disorder.cumulant(beta), h, mode);
}

std::vector<double> chaos_variables(const DisorderLaw& disorder, std::span<const double> omega,
                                    double beta, double h) {
  const double lam = disorder.cumulant(beta);
  std::vector<double> eps(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) eps[i] = std::expm1(beta * omega[i] - lam + h);
  return eps;
}

Kernel chaos_kernel(const RenewalLaw& law, std::size_t n, PinMode mode) {
  if (n > 20) throw ResourceError("exhaustive pinning kernel limited to N <= 20");
  const auto u = renewal_mass(law, n);
  if (mode == PinMode::conditioned && !(u[n] > 0.0)) {
    throw ConditioningError("u(N) = 0: conditioning on a null event");
  }
  Kernel::Entries entries;
  const std::uint64_t n_sub = std::uint64_t{1} << n;
  std::vector<Site> sites;
  for (std::uint64_t mask = 0; mask < n_sub; ++mask) {
    sites.clear();
    double w = 1.0;
    std::size_t last = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1U) {
        const std::size_t t = j + 1;
        w *= u[t - last];
        last = t;
        sites.push_back(static_cast<Site>(t));
      }
    }
    if (mode == PinMode::conditioned) w *= u[n - last] / u[n];
    if (w != 0.0) entries.emplace(IndexSet(sites), w);
  }
  return Kernel(std::move(entries));
}

double discrete_kernel(const RenewalLaw& law, std::size_t n, std::vector<double> times,
                       PinMode mode) {
  if (n == 0) throw InputError("system size must be positive");
  const double nn = static_cast<double>(n);
  std::vector<std::size_t> idx;
  idx.reserve(times.size());
  for (double t : times) {
    const double x = t * nn;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, nn) || r < 1.0 || r > nn) {
      throw InputError("time is not on the lattice (1/N)Z in (0,1]");
    }
    idx.push_back(static_cast<std::size_t>(r));
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) return 0.0;
  const auto u = renewal_mass(law, n);
  const double a = coupling_scale(law, n);
  double w = 1.0;
  std::size_t last = 0;
  for (std::size_t t : idx) {
    w *= a * u[t - last];
    last = t;
  }
  if (mode == PinMode::conditioned) {
    if (!(u[n] > 0.0)) throw ConditioningError("u(N) = 0: conditioning on a null event");
    w *= u[n - last] / u[n];
  }
  return w;
}

double continuum_kernel(const RenewalLaw& law, std::vector<double> times, double t,
                        PinMode mode) {
  std::sort(times.begin(), times.end());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double prev = i == 0 ? 0.0 : times[i - 1];
    if (!(times[i] > prev)) throw DomainError("continuum kernel at coincident times");
  }
  if (!times.empty()) {
    const bool ok = mode == PinMode::conditioned ? times.back() < t : times.back() <= t;
    if (!ok) throw DomainError("continuum kernel time outside (0, t)");
  }
  const double k = static_cast<double>(times.size());
  if (law.regime() == Regime::finite_mean) return std::pow(1.0 / law.mean(), k);
  const double a = law.alpha();
  double w = std::pow(alpha_constant(a), k);
  double prev = 0.0;
  for (double s : times) {
    w *= std::pow(s - prev, a - 1.0);
    prev = s;
  }
  if (mode == PinMode::conditioned) w *= std::pow(t, 1.0 - a) * std::pow(t - prev, a - 1.0);
  return w;
}

double first_moment(const RenewalLaw& law, std::size_t n, double h, PinMode mode) {
  const std::vector<double> zeros(n, 0.0);
  return PinningSystem(law, n).partition(zeros, 0.0, 0.0, h, mode);
}

namespace {

double intersection_second_moment(const RenewalLaw& law, std::size_t n, double s2, PinMode mode) {
  const auto u = renewal_mass(law, n);
  std::vector<double> u2(n + 1);
  for (std::size_t i = 0; i <= n; ++i) u2[i] = u[i] * u[i];
  std::vector<double> w(n + 1, 0.0);
  w[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t m = 0; m < k; ++m) s += w[m] * u2[k - m];
    w[k] = s2 * s;
  }
  if (mode == PinMode::free) {
    double total = 0.0;
    for (double x : w) total += x;
    return total;
  }
  if (!(u[n] > 0.0)) throw ConditioningError("u(N) = 0: conditioning on a null event");
  double total = 0.0;
  for (std::size_t k = 0; k <= n; ++k) total += w[k] * u2[n - k];
  return total / u2[n];
}

double pair_age_second_moment(const RenewalLaw& law, std::size_t n, double both, double one,
                              PinMode mode, std::size_t cap) {
  const std::size_t ages = std::min(law.n_max(), n + 1);
  if (ages > cap / ages) throw ResourceError("pair-age state space exceeds cap");
  std::vector<double> renew(ages);
  std::vector<double> stay(ages);
  for (std::size_t a = 0; a < ages; ++a) {
    const double s = law.survival(a);
    renew[a] = s > 0.0 ? law.jump(a + 1) / s : 0.0;
    stay[a] = s > 0.0 ? law.survival(a + 1) / s : 0.0;
  }
  std::vector<double> cur(ages * ages, 0.0);
  std::vector<double> nxt(ages * ages, 0.0);
  cur[0] = 1.0;
  std::size_t reach = 1;
  for (std::size_t step = 1; step <= n; ++step) {
    const std::size_t next_reach = std::min(ages, reach + 1);
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t a = 0; a < reach; ++a) {
      for (std::size_t b = 0; b < reach; ++b) {
        const double p = cur[a * ages + b];
        if (p == 0.0) continue;
        nxt[0] += p * renew[a] * renew[b] * both;
        if (b + 1 < ages) nxt[b + 1] += p * renew[a] * stay[b] * one;
        if (a + 1 < ages) {
          nxt[(a + 1) * ages] += p * stay[a] * renew[b] * one;
          if (b + 1 < ages) nxt[(a + 1) * ages + b + 1] += p * stay[a] * stay[b];
        }
      }
    }
    std::swap(cur, nxt);
    reach = next_reach;
  }
  if (mode == PinMode::conditioned) {
    const auto u = renewal_mass(law, n);
    if (!(u[n] > 0.0)) throw ConditioningError("u(N) = 0: conditioning on a null event");
    return cur[0] / (u[n] * u[n]);
  }
  double total = 0.0;
  for (double x : cur) total += x;
  return total;
}

}  // namespace

double second_moment_exact(const RenewalLaw& law, const DisorderLaw& disorder, std::size_t n,
                           double beta, double h, PinMode mode, SecondMomentOptions opts) {
  const double c = disorder.cumulant(2.0 * beta) - 2.0 * disorder.cumulant(beta);
  if (!std::isfinite(c)) throw DomainError("Lambda(2 beta) is not finite");
  auto method = opts.method;
  if (method == SecondMomentMethod::automatic) {
    method = h == 0.0 ? SecondMomentMethod::intersection : SecondMomentMethod::pair_age;
  }
  if (method == SecondMomentMethod::intersection) {
    if (h != 0.0) throw InputError("intersection recursion requires h = 0");
    return intersection_second_moment(law, n, std::expm1(c), mode);
  }
  return pair_age_second_moment(law, n, std::exp(2.0 * h + c), std::exp(h), mode,
                                opts.state_cap);
}

namespace {

// Σ_n b_n τ^{q0 + nα − 1}/Γ(q0 + nα); this normalization turns Laplace
// convolution into a Cauchy product of coefficient sequences.
struct FracSeries {
  double q0;
  std::vector<double> b;
};

FracSeries convolve(const FracSeries& x, const FracSeries& y, std::size_t terms) {
  FracSeries out{x.q0 + y.q0, std::vector<double>(terms, 0.0)};
  for (std::size_t i = 0; i < std::min(terms, x.b.size()); ++i) {
    for (std::size_t j = 0; i + j < terms && j < y.b.size(); ++j) out.b[i + j] += x.b[i] * y.b[j];
  }
  return out;
}

double evaluate(const FracSeries& s, double alpha, double t) {
  double total = 0.0;
  const double lt = std::log(t);
  for (std::size_t n = 0; n < s.b.size(); ++n) {
    if (s.b[n] == 0.0) continue;
    const double q = s.q0 + static_cast<double>(n) * alpha;
    total += s.b[n] * std::exp((q - 1.0) * lt - std::lgamma(q));
  }
  return total;
}

// Square of Σ_m r_m τ^{p0 + mα}, returned Gamma-normalized.
FracSeries square_normalized(const std::vector<double>& r, double p0, double alpha) {
  const std::size_t terms = r.size();
  FracSeries out{2.0 * p0 + 1.0, std::vector<double>(terms, 0.0)};
  for (std::size_t n = 0; n < terms; ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i <= n; ++i) s += r[i] * r[n - i];
    out.b[n] = s * std::tgamma(out.q0 + static_cast<double>(n) * alpha);
  }
  return out;
}

double alpha_second_moment_general(double alpha, double beta_hat, double h_hat, double t,
                                   PinMode mode, std::size_t k_max) {
  const std::size_t terms = 120;
  const double c = alpha_constant(alpha);
  const double ga = std::tgamma(alpha);
  const double x = h_hat * c * ga;
  std::vector<double> g(terms);
  std::vector<double> g_end(terms);
  for (std::size_t m = 0; m < terms; ++m) {
    const double md = static_cast<double>(m);
    const double xm = std::pow(x, md);
    g[m] = c * ga * xm / std::tgamma((md + 1.0) * alpha);
    g_end[m] = mode == PinMode::conditioned ? ga * xm / std::tgamma((md + 1.0) * alpha)
                                            : xm / std::tgamma(md * alpha + 1.0);
  }
  FracSeries a = square_normalized(g, alpha - 1.0, alpha);
  for (auto& v : a.b) v *= beta_hat * beta_hat;
  FracSeries acc =
      square_normalized(g_end, mode == PinMode::conditioned ? alpha - 1.0 : 0.0, alpha);
  double total = 0.0;
  int small = 0;
  for (std::size_t j = 0; j <= k_max; ++j) {
    const double term = evaluate(acc, alpha, t);
    total += term;
    if (std::abs(term) <= 1e-16 * std::abs(total)) {
      if (++small >= 3) break;
    } else {
      small = 0;
    }
    if (j == k_max) throw NumericError("continuum second moment did not converge by k_max");
    acc = convolve(a, acc, terms);
  }
  if (mode == PinMode::conditioned) total *= std::pow(t, 2.0 * (1.0 - alpha));
  return total;
}

}  // namespace

double continuum_second_moment(const RenewalLaw& law, double beta_hat, double h_hat, double t,
                               PinMode mode, std::size_t k_max) {
  if (!(t > 0.0)) throw InputError("continuum second moment needs t > 0");
  if (law.regime() == Regime::finite_mean) {
    const double rho = 1.0 / law.mean();
    return std::exp(2.0 * rho * h_hat * t + rho * rho * beta_hat * beta_hat * t);
  }
  const double alpha = law.alpha();
  if (!(alpha > 0.5)) throw DomainError("alpha <= 1/2: kernel is not square integrable");
  if (h_hat != 0.0) return alpha_second_moment_general(alpha, beta_hat, h_hat, t, mode, k_max);
  const double chi = 2.0 * (1.0 - alpha);
  const double c2 = std::pow(alpha_constant(alpha), 2.0);
  const double b2 = beta_hat * beta_hat;
  double total = 1.0;
  double power = 1.0;
  int small = 0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    power *= b2 * c2;
    const double d = mode == PinMode::conditioned
                         ? dirichlet_symmetric(k, chi) * std::pow(t, static_cast<double>(k) * (1.0 - chi))
                         : dirichlet_free_end(k, chi, t);
    const double term = power * d;
    total += term;
    if (term <= 1e-17 * total) {
      if (++small >= 3) return total;
    } else {
      small = 0;
    }
  }
  throw NumericError("continuum second moment did not converge by k_max");
}

double LognormalLaw::cdf(double z) const {
  if (z <= 0.0) return 0.0;
  if (volatility == 0.0) return std::log(z) >= drift ? 1.0 : 0.0;
  return normal_cdf((std::log(z) - drift) / volatility);
}

double LognormalLaw::mean() const { return std::exp(drift + 0.5 * volatility * volatility); }

LognormalLaw lognormal_limit_law(double mean_tau, double beta_hat, double h_hat, double t) {
  if (!(mean_tau >= 1.0)) throw InputError("mean inter-arrival time must be >= 1");
  const double rho = 1.0 / mean_tau;
  return {(rho * h_hat - 0.5 * rho * rho * beta_hat * beta_hat) * t,
          rho * beta_hat * std::sqrt(t)};
}

}  // namespace chaoslim
