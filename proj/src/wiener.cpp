#include "chaoslim/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "chaoslim/errors.hpp"
#include "chaoslim/rng.hpp"

namespace chaoslim {

Tessellation::Tessellation(std::vector<double> lo, std::vector<double> hi,
                           std::vector<std::size_t> cells)
    : lo_(std::move(lo)), hi_(std::move(hi)), cells_(std::move(cells)) {
  if (lo_.empty() || lo_.size() != hi_.size() || lo_.size() != cells_.size()) {
    throw InputError("tessellation axes disagree");
  }
  count_ = 1;
  volume_ = 1.0;
  for (std::size_t a = 0; a < lo_.size(); ++a) {
    if (!(hi_[a] > lo_[a]) || cells_[a] == 0) throw InputError("empty tessellation axis");
    count_ *= cells_[a];
    volume_ *= (hi_[a] - lo_[a]) / static_cast<double>(cells_[a]);
  }
}

Tessellation Tessellation::unit_cube(std::size_t d, std::size_t n_per_axis) {
  return Tessellation(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0),
                      std::vector<std::size_t>(d, n_per_axis));
}

Point Tessellation::center(std::size_t cell) const {
  Point p(lo_.size());
  for (std::size_t a = lo_.size(); a-- > 0;) {
    const std::size_t i = cell % cells_[a];
    cell /= cells_[a];
    const double h = (hi_[a] - lo_[a]) / static_cast<double>(cells_[a]);
    p[a] = lo_[a] + (static_cast<double>(i) + 0.5) * h;
  }
  return p;
}

Tessellation Tessellation::refined() const {
  auto c = cells_;
  for (auto& n : c) n *= 2;
  return Tessellation(lo_, hi_, std::move(c));
}

GridWhiteNoise::GridWhiteNoise(Tessellation tess, std::uint64_t seed)
    : tess_(std::move(tess)), seed_(seed), values_(tess_.size()) {
  const double s = std::sqrt(tess_.cell_volume());
  for (std::size_t c = 0; c < values_.size(); ++c) values_[c] = s * keyed_normal(seed, c);
}

double GridWhiteNoise::integrate(const std::function<double(const Point&)>& g) const {
  double s = 0.0;
  for (std::size_t c = 0; c < values_.size(); ++c) s += g(tess_.center(c)) * values_[c];
  return s;
}

double GridWhiteNoise::box(const std::vector<double>& lo, const std::vector<double>& hi) const {
  if (lo.size() != tess_.dimension() || hi.size() != tess_.dimension()) {
    throw InputError("box dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t c = 0; c < values_.size(); ++c) {
    const auto p = tess_.center(c);
    bool in = true;
    for (std::size_t a = 0; a < p.size() && in; ++a) in = p[a] >= lo[a] && p[a] < hi[a];
    if (in) s += values_[c];
  }
  return s;
}

GridWhiteNoise sample_noise(const Tessellation& tess, std::uint64_t seed) {
  return GridWhiteNoise(tess, seed);
}

void write_noise_csv(std::ostream& out, const GridWhiteNoise& noise) {
  const auto& t = noise.tessellation();
  out << "cell_index";
  for (std::size_t a = 0; a < t.dimension(); ++a) out << ",x_center_" << a + 1;
  out << ",value\n";
  out.precision(17);
  for (std::size_t c = 0; c < t.size(); ++c) {
    out << c;
    for (double x : t.center(c)) out << ',' << x;
    out << ',' << noise[c] << '\n';
  }
}

GriddedKernel::GriddedKernel(double c) : values_{c} {}

GriddedKernel::GriddedKernel(std::size_t degree, std::size_t cells, std::vector<double> values)
    : degree_(degree), cells_(cells), values_(std::move(values)) {
  double expect = 1.0;
  for (std::size_t i = 0; i < degree; ++i) expect *= static_cast<double>(cells);
  if (expect > static_cast<double>(kMaxEntries)) throw ResourceError("gridded kernel too large");
  if (values_.size() != static_cast<std::size_t>(expect)) {
    throw InputError("gridded kernel has the wrong number of values");
  }
}

GriddedKernel GriddedKernel::from_function(const Tessellation& tess, std::size_t degree,
                                           const std::function<double(std::span<const Point>)>& f) {
  const std::size_t n = tess.size();
  double total = 1.0;
  for (std::size_t i = 0; i < degree; ++i) total *= static_cast<double>(n);
  if (total > static_cast<double>(kMaxEntries)) throw ResourceError("gridded kernel too large");
  std::vector<Point> centers(n);
  for (std::size_t c = 0; c < n; ++c) centers[c] = tess.center(c);
  std::vector<double> vals(static_cast<std::size_t>(total));
  std::vector<Point> pts(degree);
  for (std::size_t idx = 0; idx < vals.size(); ++idx) {
    std::size_t r = idx;
    for (std::size_t i = degree; i-- > 0;) {
      pts[i] = centers[r % n];
      r /= n;
    }
    vals[idx] = f(pts);
  }
  return GriddedKernel(degree, n, std::move(vals));
}

double GriddedKernel::at(std::span<const std::size_t> tuple) const {
  std::size_t idx = 0;
  for (std::size_t c : tuple) idx = idx * cells_ + c;
  return values_[idx];
}

double GriddedKernel::norm_sq(double cell_volume) const {
  if (degree_ == 0) return values_[0] * values_[0];
  double s = 0.0;
  std::vector<std::size_t> t(degree_);
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    std::size_t r = idx;
    for (std::size_t i = degree_; i-- > 0;) {
      t[i] = r % cells_;
      r /= cells_;
    }
    std::sort(t.begin(), t.end());
    if (std::adjacent_find(t.begin(), t.end()) != t.end()) continue;
    s += values_[idx] * values_[idx];
  }
  return s * std::pow(cell_volume, static_cast<double>(degree_));
}

double GriddedKernel::asymmetry(std::uint64_t seed, std::size_t probes) const {
  if (degree_ < 2) return 0.0;
  CounterRng rng(seed);
  std::vector<std::size_t> t(degree_);
  std::vector<std::size_t> perm(degree_);
  std::vector<std::size_t> q(degree_);
  double worst = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    for (auto& c : t) c = static_cast<std::size_t>(rng.next_u64() % cells_);
    const double base = at(t);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = degree_; i-- > 1;) {
      std::swap(perm[i], perm[static_cast<std::size_t>(rng.next_u64() % (i + 1))]);
    }
    for (std::size_t i = 0; i < degree_; ++i) q[i] = t[perm[i]];
    worst = std::max(worst, std::abs(at(q) - base));
    std::swap(q[0], q[1]);
    worst = std::max(worst, std::abs(at(q) - base));
  }
  return worst;
}

namespace {

double tuple_sum(const GriddedKernel& f, std::span<const double> a, std::vector<std::size_t>& t,
                 std::vector<char>& used, std::size_t depth) {
  const std::size_t n = f.cells();
  if (depth == t.size()) return f.at(t);
  double s = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (used[c] || a[c] == 0.0) continue;
    used[c] = 1;
    t[depth] = c;
    s += a[c] * tuple_sum(f, a, t, used, depth + 1);
    used[c] = 0;
  }
  return s;
}

}  // namespace

double distinct_tuple_sum(const GriddedKernel& f, std::span<const double> weights) {
  if (f.degree() == 0) {
    const std::size_t none = 0;
    return f.at(std::span<const std::size_t>(&none, 0));
  }
  if (weights.size() != f.cells()) throw InputError("weights do not match the kernel grid");
  if (f.degree() == 2) {
    const std::size_t n = f.cells();
    double s = 0.0;
    std::size_t t[2];
    for (std::size_t i = 0; i < n; ++i) {
      t[0] = i;
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        t[1] = j;
        row += f.at(t) * weights[j];
      }
      s += weights[i] * row;
    }
    return s;
  }
  std::vector<std::size_t> t(f.degree());
  std::vector<char> used(f.cells(), 0);
  return tuple_sum(f, weights, t, used, 0);
}

double multiple_integral(const GriddedKernel& f, const GridWhiteNoise& noise) {
  if (f.degree() > 0 && f.cells() != noise.tessellation().size()) {
    throw InputError("kernel grid does not match the noise");
  }
  if (f.asymmetry() > 1e-12) throw InputError("kernel is not symmetric");
  return distinct_tuple_sum(f, noise.values());
}

std::vector<double> elementary_symmetric(std::span<const double> x, std::size_t k_max) {
  std::vector<double> e(k_max + 1, 0.0);
  e[0] = 1.0;
  std::size_t top = 0;
  for (double v : x) {
    top = std::min(top + 1, k_max);
    for (std::size_t k = top; k >= 1; --k) e[k] += v * e[k - 1];
  }
  return e;
}

void check_l2_condition(const ChaosSeriesSpec& spec) {
  if (!spec.norm_sq) return;
  const double eps = spec.biased() ? 0.1 : 0.0;
  const double s2 = spec.sigma0 * spec.sigma0;
  double sum = 0.0;
  double term = 0.0;
  double lf = 0.0;
  for (std::size_t k = 0; k <= spec.k_max + 400; ++k) {
    if (k > 0) lf += std::log(static_cast<double>(k));
    const double nk = spec.norm_sq(k);
    if (!std::isfinite(nk)) throw PreconditionError("kernel norm is not finite");
    term = nk > 0.0 ? std::exp(static_cast<double>(k) * std::log((1.0 + eps) * s2) + std::log(nk) - lf)
                    : 0.0;
    sum += term;
    if (k > spec.k_max && term <= 1e-16 * std::max(sum, 1e-300)) return;
  }
  throw PreconditionError("chaos series fails the L2 summability condition");
}

namespace {

double tail_bound(const ChaosSeriesSpec& spec) {
  if (!spec.norm_sq) return std::numeric_limits<double>::quiet_NaN();
  const double s2 = spec.sigma0 * spec.sigma0;
  double lf = std::lgamma(static_cast<double>(spec.k_max) + 2.0);
  double tail = 0.0;
  for (std::size_t k = spec.k_max + 1; k <= spec.k_max + 400; ++k) {
    if (k > spec.k_max + 1) lf += std::log(static_cast<double>(k));
    const double nk = spec.norm_sq(k);
    if (nk <= 0.0) continue;
    const double term = std::exp(static_cast<double>(k) * std::log(s2) + std::log(nk) - lf);
    tail += term;
    if (term <= 1e-18 * std::max(tail, 1e-300)) break;
  }
  return tail;
}

}  // namespace

ChaosEval chaos_series_eval(const ChaosSeriesSpec& spec, const GridWhiteNoise& noise) {
  check_l2_condition(spec);
  const auto& tess = noise.tessellation();
  const double v = tess.cell_volume();
  const std::size_t n = tess.size();
  std::vector<double> a(n);
  for (std::size_t c = 0; c < n; ++c) {
    a[c] = spec.sigma0 * noise[c];
    if (spec.biased()) a[c] += spec.bias(tess.center(c)) * v;
  }
  double value = 0.0;
  if (spec.product) {
    std::vector<double> x(n);
    for (std::size_t c = 0; c < n; ++c) x[c] = spec.product->g(tess.center(c)) * a[c];
    const auto e = elementary_symmetric(x, spec.k_max);
    // (1/k!) × k! e_k from the ordered distinct tuples.
    for (std::size_t k = 0; k <= spec.k_max; ++k) value += spec.product->coefficient(k) * e[k];
  } else {
    double fact = 1.0;
    for (std::size_t k = 0; k <= spec.k_max && k < spec.kernels.size(); ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      const auto& f = spec.kernels[k];
      if (f.degree() != k) throw InputError("kernel degree does not match its slot");
      if (k > 0 && f.cells() != n) throw InputError("kernel grid does not match the noise");
      if (f.asymmetry() > 1e-12) throw InputError("kernel is not symmetric");
      value += distinct_tuple_sum(f, a) / fact;
    }
  }
  return {value, tail_bound(spec)};
}

double cameron_martin_weight(const GridWhiteNoise& noise,
                             const std::function<double(const Point&)>& nu) {
  const auto& tess = noise.tessellation();
  double w = 0.0;
  double q = 0.0;
  for (std::size_t c = 0; c < tess.size(); ++c) {
    const double m = nu(tess.center(c));
    w += m * noise[c];
    q += m * m;
  }
  return std::exp(w - 0.5 * q * tess.cell_volume());
}

double factorized_moment(double rho, double lambda_hat, double h_hat, double zeta,
                         double volume) {
  if (!(volume > 0.0)) throw InputError("volume must be positive");
  return std::exp(rho * zeta * (h_hat - 0.5 * rho * lambda_hat * lambda_hat * (1.0 - zeta)) *
                  volume);
}

LognormalLaw factorized_law(double rho, double lambda_hat, double h_hat, double volume) {
  if (!(volume > 0.0)) throw InputError("volume must be positive");
  return {(rho * h_hat - 0.5 * rho * rho * lambda_hat * lambda_hat) * volume,
          std::abs(rho * lambda_hat) * std::sqrt(volume)};
}

ChaosSeriesSpec factorized_spec(const Tessellation& tess, double rho, double lambda_hat,
                                double h_hat, std::size_t k_max) {
  ChaosSeriesSpec spec;
  spec.sigma0 = lambda_hat;
  if (h_hat != 0.0) spec.bias = [h_hat](const Point&) { return h_hat; };
  spec.k_max = k_max;
  spec.product = ProductKernel{[rho](std::size_t k) { return std::pow(rho, static_cast<double>(k)); },
                               [](const Point&) { return 1.0; }};
  const double vol = tess.box_volume();
  spec.norm_sq = [rho, vol](std::size_t k) {
    return std::pow(rho * rho * vol, static_cast<double>(k));
  };
  return spec;
}

double product_grid_second_moment(const Tessellation& tess, double rho,
                                  const ChaosSeriesSpec& spec) {
  if (!spec.product) throw InputError("second moment needs a product kernel");
  const double v = tess.cell_volume();
  double logm = 0.0;
  for (std::size_t c = 0; c < tess.size(); ++c) {
    const auto p = tess.center(c);
    const double g = rho * spec.product->g(p);
    const double m = spec.biased() ? spec.bias(p) * v : 0.0;
    logm += std::log((1.0 + g * m) * (1.0 + g * m) + g * g * spec.sigma0 * spec.sigma0 * v);
  }
  return std::exp(logm);
}

double product_continuum_second_moment(const Tessellation& tess, double rho,
                                       const ChaosSeriesSpec& spec) {
  if (!spec.product) throw InputError("second moment needs a product kernel");
  const double v = tess.cell_volume();
  double gg = 0.0;
  double gm = 0.0;
  for (std::size_t c = 0; c < tess.size(); ++c) {
    const auto p = tess.center(c);
    const double g = spec.product->g(p);
    gg += g * g * v;
    if (spec.biased()) gm += g * spec.bias(p) * v;
  }
  return std::exp(2.0 * rho * gm + rho * rho * spec.sigma0 * spec.sigma0 * gg);
}

}  // namespace chaoslim
