#pragma once

#include <span>
#include <variant>
#include <vector>

#include "chaoslim/rng.hpp"

namespace chaoslim {

struct Atom {
  double value;
  double prob;
};

/// Finitely supported law. Atoms are merged by value and sorted ascending.
class DiscreteLaw {
 public:
  DiscreteLaw() = default;
  explicit DiscreteLaw(std::vector<Atom> atoms);

  /// Reduces a sample to its empirical law (equal weights, merged ties).
  static DiscreteLaw from_samples(std::span<const double> samples);
  static DiscreteLaw rademacher();

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double mean() const;
  double second_moment() const;
  double variance() const;
  /// E[g(X)] as an exact finite sum.
  template <class F>
  double expect(F&& g) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.prob * g(a.value);
    return s;
  }
  /// log E[exp(t X)], evaluated stably.
  double cumulant(double t) const;
  double sample(CounterRng& rng) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cdf_;
};

struct StandardGaussian {};

/// One variable of a family, described either exactly or by a sample.
struct EmpiricalSample {
  std::vector<double> values;
};

using UnivariateLaw = std::variant<DiscreteLaw, StandardGaussian, EmpiricalSample>;

double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace chaoslim
