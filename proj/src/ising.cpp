#include "chaoslim/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "chaoslim/errors.hpp"
#include "chaoslim/rng.hpp"

namespace chaoslim {

const double kBetaCritical = 0.5 * std::log(1.0 + std::sqrt(2.0));

namespace {
constexpr double kGlaisher = 1.28242712910062263687534256886979172776768892732500;
}

const double kIsingCorrelationConstant =
    std::pow(2.0, 5.0 / 48.0) * std::exp(-1.5 * (1.0 / 12.0 - std::log(kGlaisher)));

double Rect::boundary_distance(const Point2& p) const {
  return std::min({p.x - x0, x1 - p.x, p.y - y0, y1 - p.y});
}

LatticeSpinSystem LatticeSpinSystem::rectangle(int width, int height, double delta,
                                               std::size_t cap) {
  if (width < 1 || height < 1) throw InputError("rectangle needs positive sides");
  std::vector<LatticePoint> sites;
  for (int j = 1; j <= height; ++j) {
    for (int i = 1; i <= width; ++i) sites.emplace_back(i, j);
  }
  auto sys = from_sites(std::move(sites), delta, cap);
  sys.domain_ = Rect{0.0, 0.0, (width + 1) * delta, (height + 1) * delta};
  return sys;
}

LatticeSpinSystem LatticeSpinSystem::from_sites(std::vector<LatticePoint> sites, double delta,
                                                std::size_t cap) {
  if (!(delta > 0.0)) throw InputError("mesh must be positive");
  std::sort(sites.begin(), sites.end());
  if (std::adjacent_find(sites.begin(), sites.end()) != sites.end()) {
    throw InputError("repeated lattice site");
  }
  LatticeSpinSystem sys;
  sys.sites_ = std::move(sites);
  sys.delta_ = delta;
  sys.cap_ = cap;
  std::set<LatticePoint> hull;
  const std::set<LatticePoint> inside(sys.sites_.begin(), sys.sites_.end());
  for (const auto& [i, j] : sys.sites_) {
    for (const LatticePoint& q : {LatticePoint{i + 1, j}, LatticePoint{i - 1, j},
                                 LatticePoint{i, j + 1}, LatticePoint{i, j - 1}}) {
      if (!inside.count(q)) hull.insert(q);
    }
  }
  sys.boundary_.assign(hull.begin(), hull.end());
  if (sys.size() <= cap) sys.enumerate();
  return sys;
}

std::optional<std::size_t> LatticeSpinSystem::index_of(LatticePoint p) const {
  const auto it = std::lower_bound(sites_.begin(), sites_.end(), p);
  if (it == sites_.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - sites_.begin());
}

Point2 LatticeSpinSystem::position(std::size_t i) const {
  return {sites_[i].first * delta_, sites_[i].second * delta_};
}

void LatticeSpinSystem::enumerate() {
  const std::size_t n = sites_.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<int> plus(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    const auto [i, j] = sites_[a];
    for (const LatticePoint& q : {LatticePoint{i + 1, j}, LatticePoint{i - 1, j},
                                 LatticePoint{i, j + 1}, LatticePoint{i, j - 1}}) {
      if (const auto b = index_of(q)) {
        if (*b > a) edges.emplace_back(a, *b);
      } else {
        ++plus[a];
      }
    }
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  prob_.assign(count, 0.0);
  // Energies are bounded by β·(#edges + #boundary bonds); shift by the
  // all-plus energy so the largest weight is 1.
  double top = static_cast<double>(edges.size());
  for (int p : plus) top += p;
  double z = 0.0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double e = 0.0;
    for (const auto& [a, b] : edges) e += ((mask >> a ^ mask >> b) & 1U) ? -1.0 : 1.0;
    for (std::size_t a = 0; a < n; ++a) e += ((mask >> a) & 1U) ? -plus[a] : plus[a];
    const double w = std::exp(kBetaCritical * (e - top));
    prob_[mask] = w;
    z += w;
  }
  for (auto& p : prob_) p /= z;
}

const std::vector<double>& LatticeSpinSystem::probabilities() const {
  if (sites_.size() > cap_) {
    throw ResourceError("interior exceeds the enumeration cap of " + std::to_string(cap_));
  }
  return prob_;
}

double LatticeSpinSystem::correlation(const std::vector<std::size_t>& indices) const {
  const auto& p = probabilities();
  std::uint64_t sel = 0;
  for (std::size_t i : indices) {
    if (i >= size()) throw InputError("site index out of range");
    sel ^= std::uint64_t{1} << i;
  }
  double s = 0.0;
  for (std::uint64_t mask = 0; mask < p.size(); ++mask) {
    s += (std::popcount(mask & sel) & 1) ? -p[mask] : p[mask];
  }
  return s;
}

double LatticeSpinSystem::correlation_at(const std::vector<LatticePoint>& points) const {
  std::vector<std::size_t> idx;
  for (const auto& q : points) {
    const auto i = index_of(q);
    if (!i) throw InputError("point is not an interior site");
    idx.push_back(*i);
  }
  return correlation(idx);
}

std::vector<double> LatticeSpinSystem::all_correlations() const {
  std::vector<double> c = probabilities();
  for (std::size_t h = 1; h < c.size(); h <<= 1) {
    for (std::size_t i = 0; i < c.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = c[j];
        const double b = c[j + h];
        c[j] = a + b;
        c[j + h] = a - b;
      }
    }
  }
  return c;
}

double rfim_partition(const LatticeSpinSystem& system, const std::vector<double>& xi) {
  const auto& p = system.probabilities();
  if (xi.size() != system.size()) throw InputError("field size does not match the system");
  double s = 0.0;
  for (std::uint64_t mask = 0; mask < p.size(); ++mask) {
    double e = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) e += ((mask >> a) & 1U) ? -xi[a] : xi[a];
    s += p[mask] * std::exp(e);
  }
  return s;
}

ChaosRewrite chaos_rewrite(const LatticeSpinSystem& system, const std::vector<double>& xi) {
  if (xi.size() != system.size()) throw InputError("field size does not match the system");
  const auto corr = system.all_correlations();
  double pre = 1.0;
  for (double v : xi) pre *= std::cosh(v);
  Kernel::Entries entries;
  for (std::uint64_t mask = 0; mask < corr.size(); ++mask) {
    std::vector<Site> sites;
    for (std::size_t a = 0; a < system.size(); ++a) {
      if ((mask >> a) & 1U) sites.push_back(static_cast<Site>(a));
    }
    entries.emplace(IndexSet(std::move(sites)), corr[mask]);
  }
  return {pre, Kernel(std::move(entries))};
}

FieldProfiles FieldProfiles::constant(double lambda_hat, double h_hat) {
  return {[lambda_hat](double, double) { return lambda_hat; },
          [h_hat](double, double) { return h_hat; }};
}

SiteFields scale_fields(const FieldProfiles& profiles, const LatticeSpinSystem& system) {
  const double d = system.delta();
  const double sl = std::pow(d, 7.0 / 8.0);
  const double sh = std::pow(d, 15.0 / 8.0);
  SiteFields f;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const auto p = system.position(i);
    f.lambda.push_back(profiles.lambda_hat(p.x, p.y) * sl);
    f.h.push_back(profiles.h_hat(p.x, p.y) * sh);
  }
  return f;
}

std::vector<double> field_xi(const SiteFields& fields, const std::vector<double>& omega) {
  if (omega.size() != fields.lambda.size()) throw InputError("disorder size mismatch");
  std::vector<double> xi(omega.size());
  for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = fields.lambda[i] * omega[i] + fields.h[i];
  return xi;
}

double normalization_prefactor(const FieldProfiles& profiles, const Rect& domain, double delta) {
  if (!(delta > 0.0)) throw InputError("mesh must be positive");
  const auto nx = std::max<long>(1, std::lround((domain.x1 - domain.x0) / delta));
  const auto ny = std::max<long>(1, std::lround((domain.y1 - domain.y0) / delta));
  const double hx = (domain.x1 - domain.x0) / static_cast<double>(nx);
  const double hy = (domain.y1 - domain.y0) / static_cast<double>(ny);
  double norm = 0.0;
  for (long i = 0; i < nx; ++i) {
    for (long j = 0; j < ny; ++j) {
      const double v = profiles.lambda_hat(domain.x0 + (i + 0.5) * hx, domain.y0 + (j + 0.5) * hy);
      norm += v * v;
    }
  }
  norm *= hx * hy;
  return std::exp(-0.5 * norm * std::pow(delta, -0.25));
}

DecouplingCheck gks_decoupling_check(const LatticeSpinSystem& system,
                                     const std::vector<Subdomain>& parts) {
  std::vector<std::set<LatticePoint>> inner;
  std::vector<std::set<LatticePoint>> closure;
  std::vector<LatticePoint> marked;
  double rhs = 1.0;
  for (const auto& part : parts) {
    const auto sub = LatticeSpinSystem::from_sites(part.sites, system.delta());
    for (const auto& q : part.sites) {
      if (!system.index_of(q)) throw InputError("subdomain leaves the system");
    }
    if (!sub.index_of(part.marked)) throw InputError("marked site outside its subdomain");
    inner.emplace_back(part.sites.begin(), part.sites.end());
    std::set<LatticePoint> cl(part.sites.begin(), part.sites.end());
    cl.insert(sub.boundary().begin(), sub.boundary().end());
    closure.push_back(std::move(cl));
    marked.push_back(part.marked);
    rhs *= sub.correlation_at({part.marked});
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (i == j) continue;
      for (const auto& q : inner[i]) {
        if (closure[j].count(q)) throw InputError("subdomains overlap a neighbour's closure");
      }
    }
  }
  const double lhs = system.correlation_at(marked);
  return {lhs, rhs, lhs >= -1e-14 && lhs <= rhs + 1e-12};
}

double f_omega(const std::vector<Point2>& points, const Rect& domain) {
  double f = 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!domain.contains(points[i])) throw InputError("point outside the domain");
    double d = domain.boundary_distance(points[i]);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      d = std::min(d, std::hypot(points[i].x - points[j].x, points[i].y - points[j].y));
    }
    if (!(d > 0.0)) throw DomainError("f_omega at coincident points");
    f *= std::pow(d, -0.125);
  }
  return f;
}

namespace {

McEstimate l2_norm_mc(const Rect& domain, std::size_t n, std::size_t samples, CounterRng& rng) {
  if (n == 0) return {1.0, 0.0};
  std::vector<Point2> pts(n);
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    for (auto& p : pts) {
      p.x = domain.x0 + (domain.x1 - domain.x0) * rng.uniform();
      p.y = domain.y0 + (domain.y1 - domain.y0) * rng.uniform();
    }
    const double f = f_omega(pts, domain);
    const double v = f * f;
    s += v;
    s2 += v * v;
  }
  const double m = s / static_cast<double>(samples);
  const double var = std::max(0.0, s2 / static_cast<double>(samples) - m * m);
  const double vol = std::pow(domain.area(), static_cast<double>(n));
  return {vol * m, vol * std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace

McEstimate f_omega_l2_ratio(const Rect& domain, std::size_t n, std::size_t samples,
                            std::uint64_t seed) {
  if (n == 0) throw InputError("n must be at least 1");
  if (samples < 2) throw InputError("need at least two samples");
  CounterRng top(derive_seed(seed, 2 * n));
  CounterRng bottom(derive_seed(seed, 2 * n + 1));
  const auto a = l2_norm_mc(domain, n, samples, top);
  const auto b = l2_norm_mc(domain, n - 1, samples, bottom);
  const double r = a.value / b.value;
  const double rel = std::hypot(a.std_error / a.value, b.std_error / b.value);
  return {r, r * rel};
}

double correlation_bound_constant(const LatticeSpinSystem& system, std::size_t max_order) {
  const auto dom = system.domain();
  if (!dom) throw InputError("correlation audit needs a rectangular system");
  const auto corr = system.all_correlations();
  const double d = system.delta();
  double c = 0.0;
  for (std::uint64_t mask = 1; mask < corr.size(); ++mask) {
    const auto n = static_cast<std::size_t>(std::popcount(mask));
    if (n > max_order) continue;
    std::vector<Point2> pts;
    for (std::size_t a = 0; a < system.size(); ++a) {
      if ((mask >> a) & 1U) pts.push_back(system.position(a));
    }
    const double nd = static_cast<double>(n);
    const double ratio = std::pow(d, -nd / 8.0) * std::max(0.0, corr[mask]) / f_omega(pts, *dom);
    c = std::max(c, std::pow(ratio, 1.0 / nd));
  }
  return c;
}

}  // namespace chaoslim
