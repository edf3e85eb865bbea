#pragma once

#include <string>
#include <vector>

#include "chaoslim/laws.hpp"
#include "chaoslim/rng.hpp"

namespace chaoslim {

/// Law of a single disorder variable ω: centered, unit variance, with
/// cumulant Λ(t) = log E[e^{tω}].
class DisorderLaw {
 public:
  enum class Kind { gaussian, rademacher, atoms };

  static DisorderLaw gaussian();
  static DisorderLaw rademacher();
  /// Throws InputError unless the atoms are centered with unit variance.
  static DisorderLaw from_atoms(std::vector<Atom> atoms);
  /// "gaussian" or "rademacher".
  static DisorderLaw from_name(const std::string& name);

  Kind kind() const { return kind_; }
  bool is_discrete() const { return kind_ != Kind::gaussian; }
  /// Atoms of a discrete law (Rademacher included).
  const DiscreteLaw& atoms() const;

  double cumulant(double t) const;
  double sample(CounterRng& rng) const;
  std::vector<double> sample_n(std::size_t n, CounterRng& rng) const;

 private:
  Kind kind_ = Kind::gaussian;
  DiscreteLaw law_;
};

}  // namespace chaoslim
