#include "chaoslim/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "chaoslim/errors.hpp"
#include "chaoslim/rng.hpp"

namespace chaoslim {

double Pmf::at(std::int64_t k) const {
  if (k < lo() || k > hi()) return 0.0;
  return p[static_cast<std::size_t>(k - offset)];
}

double Pmf::total() const { return std::accumulate(p.begin(), p.end(), 0.0); }

namespace {

Pmf trimmed(Pmf pmf) {
  std::size_t first = 0;
  while (first < pmf.p.size() && pmf.p[first] == 0.0) ++first;
  std::size_t last = pmf.p.size();
  while (last > first && pmf.p[last - 1] == 0.0) --last;
  Pmf out;
  out.offset = pmf.offset + static_cast<std::int64_t>(first);
  out.p.assign(pmf.p.begin() + static_cast<std::ptrdiff_t>(first),
               pmf.p.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

Pmf convolve(const Pmf& a, const Pmf& b) {
  Pmf out;
  out.offset = a.offset + b.offset;
  out.p.assign(a.p.size() + b.p.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.p.size(); ++i) {
    if (a.p[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.p.size(); ++j) out.p[i + j] += a.p[i] * b.p[j];
  }
  return out;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

WalkLaw WalkLaw::simple() {
  Pmf pmf;
  pmf.offset = -1;
  pmf.p = {0.5, 0.0, 0.5};
  return from_pmf(pmf);
}

WalkLaw WalkLaw::from_pmf(Pmf pmf) {
  for (double q : pmf.p) {
    if (!(q >= 0.0)) throw InputError("negative walk probability");
  }
  pmf = trimmed(std::move(pmf));
  if (pmf.p.empty() || std::abs(pmf.total() - 1.0) > 1e-12) {
    throw InputError("walk pmf must sum to 1");
  }
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t g = 0;
  for (std::size_t i = 0; i < pmf.p.size(); ++i) {
    const auto k = pmf.offset + static_cast<std::int64_t>(i);
    mean += static_cast<double>(k) * pmf.p[i];
    m2 += static_cast<double>(k * k) * pmf.p[i];
    if (pmf.p[i] > 0.0) g = std::gcd(g, k - pmf.offset);
  }
  if (std::abs(mean) > 1e-12) throw InputError("walk increments must have zero mean");
  if (g == 0) throw InputError("degenerate walk law");
  WalkLaw law;
  law.pmf_ = std::move(pmf);
  law.period_ = static_cast<int>(g);
  law.residue_ = static_cast<int>(floor_mod(law.pmf_.offset, g));
  law.variance_ = m2 - mean * mean;
  law.spec_ = StableSpec::gaussian(law.variance_);
  return law;
}

WalkLaw WalkLaw::heavy_tail(double alpha, double gamma, std::int64_t window) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw InputError("heavy-tail index must lie in (1, 2)");
  if (!(std::abs(gamma) <= 1.0)) throw InputError("skewness must lie in [-1, 1]");
  if (window < 2) throw InputError("heavy-tail window must be >= 2");
  double s_tail = 0.0;
  double s_mean = 0.0;
  for (std::int64_t n = 2; n <= window; ++n) {
    const double nd = static_cast<double>(n);
    s_tail += std::pow(nd, -1.0 - alpha);
    s_mean += std::pow(nd, -alpha);
  }
  const double c = 0.25 / s_tail;
  const double m = 2.0 * c * gamma * s_mean;
  if (std::abs(m) > 0.5) throw InputError("skewness too large for the mean correction");
  Pmf pmf;
  pmf.offset = -window;
  pmf.p.assign(static_cast<std::size_t>(2 * window + 1), 0.0);
  auto idx = [&](std::int64_t k) { return static_cast<std::size_t>(k + window); };
  for (std::int64_t n = 2; n <= window; ++n) {
    const double base = c * std::pow(static_cast<double>(n), -1.0 - alpha);
    pmf.p[idx(n)] = base * (1.0 + gamma);
    pmf.p[idx(-n)] = base * (1.0 - gamma);
  }
  pmf.p[idx(1)] = (0.5 - m) / 2.0;
  pmf.p[idx(-1)] = (0.5 + m) / 2.0;
  WalkLaw law = from_pmf(std::move(pmf));
  law.spec_ = StableSpec::stable(alpha, gamma, 2.0 * c / alpha);
  return law;
}

bool WalkLaw::on_lattice(std::int64_t n, std::int64_t k) const {
  return floor_mod(k - static_cast<std::int64_t>(residue_) * n, period_) == 0;
}

Pmf walk_pmf(const WalkLaw& law, std::size_t n) {
  Pmf q;
  q.p = {1.0};
  for (std::size_t i = 0; i < n; ++i) q = convolve(q, law.pmf());
  return q;
}

std::vector<Pmf> walk_pmfs(const WalkLaw& law, std::size_t n) {
  std::vector<Pmf> out;
  out.reserve(n + 1);
  Pmf q;
  q.p = {1.0};
  out.push_back(q);
  for (std::size_t i = 0; i < n; ++i) {
    q = convolve(q, law.pmf());
    out.push_back(q);
  }
  return out;
}

double gnedenko_gap(const WalkLaw& law, std::size_t n) {
  if (n == 0) throw InputError("gnedenko gap needs n >= 1");
  const Pmf q = walk_pmf(law, n);
  const auto nn = static_cast<std::int64_t>(n);
  const double s = std::pow(static_cast<double>(n), 1.0 / law.alpha());
  const double p = law.period();
  double gap = 0.0;
  for (std::int64_t k = q.lo(); k <= q.hi(); ++k) {
    if (!law.on_lattice(nn, k)) continue;
    const double g = stable_density(law.limit(), static_cast<double>(k) / s);
    gap = std::max(gap, std::abs(s * q.at(k) - p * g));
  }
  return gap;
}

double scale_beta(double alpha, double beta_hat, std::size_t n) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw InputError("alpha must lie in (1, 2]");
  return beta_hat * std::pow(static_cast<double>(n), -(alpha - 1.0) / (2.0 * alpha));
}

SpaceTimeField keyed_field(const DisorderLaw& disorder, std::uint64_t seed) {
  return [disorder, seed](std::int64_t n, std::int64_t x) {
    const auto key = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(n)),
                                 static_cast<std::uint64_t>(x));
    CounterRng rng(key);
    return disorder.sample(rng);
  };
}

double polymer_partition(const WalkLaw& law, const DisorderLaw& disorder,
                         const SpaceTimeField& omega, double beta, std::size_t n,
                         PolymerMode mode, std::optional<std::int64_t> y) {
  if (mode != PolymerMode::free && !y) throw InputError("endpoint required for this mode");
  const double lam = disorder.cumulant(beta);
  const Pmf& step = law.pmf();
  Pmf z;
  z.p = {1.0};
  for (std::size_t i = 1; i <= n; ++i) {
    z = convolve(z, step);
    const auto t = static_cast<std::int64_t>(i);
    for (std::size_t j = 0; j < z.p.size(); ++j) {
      if (z.p[j] == 0.0) continue;
      const std::int64_t x = z.offset + static_cast<std::int64_t>(j);
      z.p[j] *= std::exp(beta * omega(t, x) - lam);
    }
  }
  if (mode == PolymerMode::free) return z.total();
  const double zy = z.at(*y);
  if (mode == PolymerMode::point2point) return zy;
  const double qy = walk_pmf(law, n).at(*y);
  if (!(qy > 0.0)) throw ConditioningError("endpoint has zero probability");
  return zy / qy;
}

Site polymer_site(std::int64_t n, std::int64_t k, std::int64_t radius) {
  return n * (2 * radius + 1) + (k + radius);
}

Kernel polymer_chaos_kernel(const WalkLaw& law, std::size_t n, PolymerMode mode,
                            std::optional<std::int64_t> y) {
  if (mode != PolymerMode::free && !y) throw InputError("endpoint required for this mode");
  const auto qs = walk_pmfs(law, n);
  const auto nn = static_cast<std::int64_t>(n);
  const std::int64_t radius =
      nn * std::max(std::abs(law.pmf().lo()), std::abs(law.pmf().hi()));
  double norm = 1.0;
  if (mode == PolymerMode::conditioned) {
    norm = qs[n].at(*y);
    if (!(norm > 0.0)) throw ConditioningError("endpoint has zero probability");
  }
  Kernel::Entries entries;
  std::vector<Site> sites;
  const std::size_t cap = 2'000'000;
  auto emit = [&](std::int64_t last_n, std::int64_t last_k, double w) {
    double v = w;
    if (mode != PolymerMode::free) v *= qs[static_cast<std::size_t>(nn - last_n)].at(*y - last_k) / norm;
    if (v != 0.0) entries.emplace(IndexSet(sites), v);
    if (entries.size() > cap) throw ResourceError("polymer chaos kernel too large");
  };
  std::function<void(std::int64_t, std::int64_t, double)> rec = [&](std::int64_t last_n,
                                                                    std::int64_t last_k,
                                                                    double w) {
    emit(last_n, last_k, w);
    for (std::int64_t m = last_n + 1; m <= nn; ++m) {
      const Pmf& q = qs[static_cast<std::size_t>(m - last_n)];
      for (std::int64_t d = q.lo(); d <= q.hi(); ++d) {
        const double pq = q.at(d);
        if (pq == 0.0) continue;
        sites.push_back(polymer_site(m, last_k + d, radius));
        rec(m, last_k + d, w * pq);
        sites.pop_back();
      }
    }
  };
  rec(0, 0, 1.0);
  return Kernel(std::move(entries));
}

double polymer_kernel_discrete(const WalkLaw& law, std::size_t n,
                               std::vector<SpaceTimePoint> points, double x, PolymerMode mode) {
  if (n == 0) throw InputError("system size must be positive");
  const double nd = static_cast<double>(n);
  const double al = law.alpha();
  const double s = std::pow(nd, 1.0 / al);
  auto to_int = [](double v, double tol) -> std::optional<std::int64_t> {
    const double r = std::round(v);
    if (std::abs(v - r) > tol) return std::nullopt;
    return static_cast<std::int64_t>(r);
  };
  std::vector<std::pair<std::int64_t, std::int64_t>> lattice;
  for (const auto& pt : points) {
    const auto ni = to_int(pt.t * nd, 1e-9 * nd);
    const auto ki = to_int(pt.x * s, 1e-9 * std::max(1.0, s * std::abs(pt.x)));
    if (!ni || !ki || *ni < 1 || *ni > static_cast<std::int64_t>(n) || !law.on_lattice(*ni, *ki)) {
      throw InputError("point is not on the rescaled lattice");
    }
    lattice.emplace_back(*ni, *ki);
  }
  std::sort(lattice.begin(), lattice.end());
  for (std::size_t i = 1; i < lattice.size(); ++i) {
    if (lattice[i].first == lattice[i - 1].first) return 0.0;
  }
  std::map<std::int64_t, Pmf> cache;
  auto q = [&](std::int64_t m, std::int64_t k) {
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, walk_pmf(law, static_cast<std::size_t>(m))).first;
    return it->second.at(k);
  };
  const double factor = std::pow(nd, -(al - 1.0) / (2.0 * al));
  double w = 1.0;
  std::int64_t ln = 0;
  std::int64_t lk = 0;
  for (const auto& [ni, ki] : lattice) {
    w *= factor * q(ni - ln, ki - lk);
    ln = ni;
    lk = ki;
  }
  if (mode == PolymerMode::free) return w;
  const auto nn = static_cast<std::int64_t>(n);
  const auto yi = to_int(x * s, 1e-9 * std::max(1.0, s * std::abs(x)));
  if (!yi || !law.on_lattice(nn, *yi)) throw InputError("endpoint is not on the rescaled lattice");
  w *= q(nn - ln, *yi - lk);
  if (mode == PolymerMode::point2point) return w;
  const double qn = q(nn, *yi);
  if (!(qn > 0.0)) throw ConditioningError("endpoint has zero probability");
  return w / qn;
}

double polymer_kernel_continuum(const WalkLaw& law, std::vector<SpaceTimePoint> points, double t,
                                double x, PolymerMode mode) {
  if (mode == PolymerMode::point2point) {
    throw InputError("continuum kernel is defined for free and conditioned modes");
  }
  std::sort(points.begin(), points.end(),
            [](const SpaceTimePoint& a, const SpaceTimePoint& b) { return a.t < b.t; });
  const double sp = std::sqrt(static_cast<double>(law.period()));
  double w = 1.0;
  double lt = 0.0;
  double lx = 0.0;
  for (const auto& pt : points) {
    if (!(pt.t > lt)) throw DomainError("continuum kernel at coincident times");
    w *= sp * stable_density_t(law.limit(), pt.t - lt, pt.x - lx);
    lt = pt.t;
    lx = pt.x;
  }
  if (mode == PolymerMode::free) {
    if (lt > t) throw DomainError("continuum kernel time beyond t");
    return w;
  }
  if (!(lt < t)) throw DomainError("continuum kernel time not before t");
  return w * stable_density_t(law.limit(), t - lt, x - lx) / stable_density_t(law.limit(), t, x);
}

double polymer_second_moment_exact(const WalkLaw& law, const DisorderLaw& disorder,
                                   std::size_t n, double beta, PolymerSecondMomentOptions opts) {
  const double c = disorder.cumulant(2.0 * beta) - 2.0 * disorder.cumulant(beta);
  if (!std::isfinite(c)) throw DomainError("Lambda(2 beta) is not finite");
  const double boost = std::exp(c);
  Pmf rev;
  rev.offset = -law.pmf().hi();
  rev.p.assign(law.pmf().p.rbegin(), law.pmf().p.rend());
  const Pmf d = trimmed(convolve(law.pmf(), rev));
  const std::int64_t span = d.hi();
  const auto nn = static_cast<std::int64_t>(n);
  std::int64_t radius = opts.window;
  if (radius <= 0) {
    const std::int64_t full = nn * span;
    if (static_cast<std::size_t>(2 * full + 1) <= opts.max_states) {
      radius = full;
    } else {
      const auto& lim = law.limit();
      const double scale = lim.alpha == 2.0 ? std::sqrt(2.0 * lim.sigma2)
                                            : std::pow(2.0 * lim.scale(), 1.0 / lim.alpha);
      radius = static_cast<std::int64_t>(
          std::ceil(4.0 * std::pow(static_cast<double>(n), 1.0 / lim.alpha) * scale));
    }
  }
  if (static_cast<std::size_t>(2 * radius + 1) > opts.max_states) {
    throw ResourceError("difference-walk window exceeds state cap");
  }
  const auto width = static_cast<std::size_t>(2 * radius + 1);
  std::vector<double> cur(width, 0.0);
  std::vector<double> nxt(width, 0.0);
  cur[static_cast<std::size_t>(radius)] = 1.0;
  double lost = 0.0;
  std::int64_t reach = 0;
  for (std::size_t step = 1; step <= n; ++step) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::int64_t x = -reach; x <= reach; ++x) {
      const double v = cur[static_cast<std::size_t>(x + radius)];
      if (v == 0.0) continue;
      for (std::int64_t j = d.lo(); j <= d.hi(); ++j) {
        const double pj = d.at(j);
        if (pj == 0.0) continue;
        const std::int64_t y = x + j;
        if (y < -radius || y > radius) {
          lost += v * pj;
        } else {
          nxt[static_cast<std::size_t>(y + radius)] += v * pj;
        }
      }
    }
    nxt[static_cast<std::size_t>(radius)] *= boost;
    std::swap(cur, nxt);
    reach = std::min(radius, reach + span);
  }
  const double total = std::accumulate(cur.begin(), cur.end(), 0.0);
  if (lost > opts.max_lost_mass * (total + lost)) {
    throw ResourceError("difference-walk window lost mass " + std::to_string(lost));
  }
  return total;
}

double polymer_second_moment_continuum(const WalkLaw& law, double beta_hat, double t,
                                       std::size_t k_max) {
  if (!(t > 0.0)) throw InputError("continuum second moment needs t > 0");
  if (beta_hat == 0.0) return 1.0;
  const double al = law.alpha();
  const double a = 1.0 - 1.0 / al;
  const double x = static_cast<double>(law.period()) * beta_hat * beta_hat *
                   stable_l2_norm_sq(law.limit()) * std::tgamma(a);
  const double lx = std::log(x) + a * std::log(t);
  double total = 1.0;
  double prev = INFINITY;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double kd = static_cast<double>(k);
    const double term = std::exp(kd * lx - std::lgamma(kd * a + 1.0));
    total += term;
    if (term < prev && term <= 1e-17 * total) return total;
    prev = term;
  }
  throw NumericError("continuum polymer series is not summable within k_max terms");
}

}  // namespace chaoslim
