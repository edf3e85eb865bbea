#include "chaoslim/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chaoslim/errors.hpp"

namespace chaoslim {

DiscreteLaw::DiscreteLaw(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.prob >= 0.0) || !std::isfinite(a.value)) {
      throw InputError("atom with negative probability or non-finite value");
    }
    if (a.prob == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().value == a.value) {
      atoms_.back().prob += a.prob;
    } else {
      atoms_.push_back(a);
    }
    total += a.prob;
  }
  if (atoms_.empty() || std::abs(total - 1.0) > 1e-9) {
    throw InputError("atom probabilities must sum to 1");
  }
  cdf_.reserve(atoms_.size());
  double c = 0.0;
  for (const auto& a : atoms_) {
    c += a.prob;
    cdf_.push_back(c);
  }
  cdf_.back() = 1.0;
}

DiscreteLaw DiscreteLaw::from_samples(std::span<const double> samples) {
  if (samples.empty()) throw InputError("empty sample");
  std::vector<Atom> atoms;
  atoms.reserve(samples.size());
  const double w = 1.0 / static_cast<double>(samples.size());
  for (double x : samples) atoms.push_back({x, w});
  return DiscreteLaw(std::move(atoms));
}

DiscreteLaw DiscreteLaw::rademacher() { return DiscreteLaw({{-1.0, 0.5}, {1.0, 0.5}}); }

double DiscreteLaw::mean() const {
  return expect([](double x) { return x; });
}

double DiscreteLaw::second_moment() const {
  return expect([](double x) { return x * x; });
}

double DiscreteLaw::variance() const {
  const double m = mean();
  return expect([m](double x) { return (x - m) * (x - m); });
}

double DiscreteLaw::cumulant(double t) const {
  double top = -INFINITY;
  for (const auto& a : atoms_) top = std::max(top, t * a.value);
  double s = 0.0;
  for (const auto& a : atoms_) s += a.prob * std::exp(t * a.value - top);
  return top + std::log(s);
}

double DiscreteLaw::sample(CounterRng& rng) const {
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()),
                                         atoms_.size() - 1);
  return atoms_[idx].value;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace chaoslim
