#include "chaoslim/disorder.hpp"

#include <cmath>

#include "chaoslim/errors.hpp"

namespace chaoslim {

DisorderLaw DisorderLaw::gaussian() { return {}; }

DisorderLaw DisorderLaw::rademacher() {
  DisorderLaw d;
  d.kind_ = Kind::rademacher;
  d.law_ = DiscreteLaw::rademacher();
  return d;
}

DisorderLaw DisorderLaw::from_atoms(std::vector<Atom> atoms) {
  DisorderLaw d;
  d.kind_ = Kind::atoms;
  d.law_ = DiscreteLaw(std::move(atoms));
  if (std::abs(d.law_.mean()) > 1e-9 || std::abs(d.law_.variance() - 1.0) > 1e-9) {
    throw InputError("disorder atoms must be centered with unit variance");
  }
  return d;
}

DisorderLaw DisorderLaw::from_name(const std::string& name) {
  if (name == "gaussian") return gaussian();
  if (name == "rademacher") return rademacher();
  throw InputError("unknown disorder law '" + name + "'");
}

const DiscreteLaw& DisorderLaw::atoms() const {
  if (!is_discrete()) throw InputError("gaussian disorder has no atoms");
  return law_;
}

double DisorderLaw::cumulant(double t) const {
  switch (kind_) {
    case Kind::gaussian:
      return 0.5 * t * t;
    case Kind::rademacher: {
      const double a = std::abs(t);
      return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    }
    case Kind::atoms:
      return law_.cumulant(t);
  }
  return 0.0;
}

double DisorderLaw::sample(CounterRng& rng) const {
  switch (kind_) {
    case Kind::gaussian:
      return rng.normal();
    case Kind::rademacher:
      return rng.rademacher();
    case Kind::atoms:
      return law_.sample(rng);
  }
  return 0.0;
}

std::vector<double> DisorderLaw::sample_n(std::size_t n, CounterRng& rng) const {
  std::vector<double> out(n);
  for (auto& x : out) x = sample(rng);
  return out;
}

}  // namespace chaoslim
