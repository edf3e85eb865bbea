#include "chaoslim/tilting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chaoslim/errors.hpp"

namespace chaoslim {

namespace {

constexpr double kSlack = 1e-12;

std::vector<Atom> reflect(std::span<const Atom> atoms) {
  std::vector<Atom> out;
  for (const auto& a : atoms) out.push_back({-a.value, a.prob});
  std::reverse(out.begin(), out.end());
  return out;
}

double second_moment(std::span<const Atom> atoms) {
  double s = 0.0;
  for (const auto& a : atoms) s += a.prob * a.value * a.value;
  return s;
}

double mean(std::span<const Atom> atoms) {
  double s = 0.0;
  for (const auto& a : atoms) s += a.prob * a.value;
  return s;
}

double two_sided_A(std::span<const Atom> atoms) {
  const double m2 = second_moment(atoms);
  if (!(m2 > 0.0)) throw InputError("tilting needs a non-degenerate law");
  std::vector<double> cand;
  for (const auto& a : atoms) {
    if (a.value != 0.0) cand.push_back(std::abs(a.value));
  }
  std::sort(cand.begin(), cand.end());
  for (double A : cand) {
    double tail = 0.0;
    for (const auto& a : atoms) {
      if (std::abs(a.value) > A) tail += a.prob * a.value * a.value;
    }
    if (tail <= 0.25 * m2 * (1.0 + kSlack)) return A;
  }
  return cand.back();
}

// Assumes E[X] ≥ 0.
double one_sided_A(std::span<const Atom> atoms) {
  double m2pos = 0.0;
  std::vector<double> cand;
  for (const auto& a : atoms) {
    if (a.value >= 0.0) m2pos += a.prob * a.value * a.value;
    if (a.value > 0.0) cand.push_back(a.value);
  }
  if (cand.empty()) throw InputError("one-sided window needs positive atoms");
  for (double A : cand) {
    double tail = 0.0;
    for (const auto& a : atoms) {
      if (a.value > A) tail += a.prob * a.value * a.value;
    }
    if (tail <= 0.25 * m2pos * (1.0 + kSlack)) return A;
  }
  return cand.back();
}

struct Window {
  std::vector<Atom> y;  // conditional law on the window
  double mass = 0.0;
};

Window restrict(std::span<const Atom> atoms, double lo, double hi) {
  Window w;
  for (const auto& a : atoms) {
    if (a.value >= lo && a.value <= hi) {
      w.y.push_back(a);
      w.mass += a.prob;
    }
  }
  if (!(w.mass > 0.0)) throw ConditioningError("tilting window carries no mass");
  for (auto& a : w.y) a.prob /= w.mass;
  return w;
}

double log_mgf(std::span<const Atom> y, double lambda) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& a : y) top = std::max(top, lambda * a.value);
  double s = 0.0;
  for (const auto& a : y) s += a.prob * std::exp(lambda * a.value - top);
  return top + std::log(s);
}

double tilted_y_mean(std::span<const Atom> y, double lambda) {
  const double F = log_mgf(y, lambda);
  double s = 0.0;
  for (const auto& a : y) s += a.prob * a.value * std::exp(lambda * a.value - F);
  return s;
}

double variance(std::span<const Atom> y) {
  const double m = mean(y);
  return std::max(0.0, second_moment(y) - m * m);
}

}  // namespace

double choose_A(const DiscreteLaw& law, TiltInterval interval) {
  if (interval == TiltInterval::two_sided) return two_sided_A(law.atoms());
  if (law.mean() < 0.0) return one_sided_A(reflect(law.atoms()));
  return one_sided_A(law.atoms());
}

double TiltResult::f(double x) const {
  if (x < lo || x > hi) return 1.0;
  return std::exp(lambda * x - log_norm);
}

double TiltResult::tilted_mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) s += atoms[i].prob * density[i] * atoms[i].value;
  return s;
}

double TiltResult::tilted_second_moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    s += atoms[i].prob * density[i] * atoms[i].value * atoms[i].value;
  }
  return s;
}

double TiltResult::normalization() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) s += atoms[i].prob * density[i];
  return s;
}

TiltResult tilt_zero_mean(const DiscreteLaw& law, TiltInterval interval) {
  TiltResult r;
  r.interval = interval;
  r.atoms.assign(law.atoms().begin(), law.atoms().end());
  const double mu_orig = law.mean();

  std::vector<Atom> work = r.atoms;
  if (interval == TiltInterval::one_sided && mu_orig < 0.0) {
    work = reflect(r.atoms);
    r.reflected = true;
  }
  const double mu = mean(work);
  const double m2 = second_moment(work);

  double lo = 0.0;
  double hi = 0.0;
  Window w;
  if (interval == TiltInterval::two_sided) {
    r.A = two_sided_A(work);
    lo = -r.A;
    hi = r.A;
    r.epsilon = m2 * m2 / (144.0 * std::pow(r.A, 3));
    if (std::abs(mu) > r.epsilon) {
      throw PreconditionError("|E[X]| = " + std::to_string(std::abs(mu)) +
                              " exceeds epsilon = " + std::to_string(r.epsilon));
    }
    w = restrict(work, lo, hi);
  } else {
    r.A = one_sided_A(work);
    lo = 0.0;
    hi = r.A;
    double ppos = 0.0;
    double m2pos = 0.0;
    for (const auto& a : work) {
      if (a.value >= 0.0) {
        ppos += a.prob;
        m2pos += a.prob * a.value * a.value;
      }
    }
    const double cond = m2pos / ppos;
    r.epsilon = cond * cond / (144.0 * std::pow(r.A, 3));
    w = restrict(work, lo, hi);
    const double vy = variance(w.y);
    const double room = w.mass * vy * vy / (24.0 * std::pow(r.A, 3));
    if (!(vy > 0.0) || mu > room) {
      throw PreconditionError("one-sided window cannot absorb E[X] = " + std::to_string(mu));
    }
  }

  const double vy = variance(w.y);
  r.bracket = vy / (12.0 * std::pow(r.A, 3));
  double lambda = 0.0;
  if (mu != 0.0) {
    const double target = mean(w.y) - mu / w.mass;
    auto g = [&](double l) { return tilted_y_mean(w.y, l) - target; };
    double a = -r.bracket;
    double b = r.bracket;
    if (!(g(a) <= 0.0 && g(b) >= 0.0)) {
      throw NumericError("tilt equation is not bracketed on |lambda| <= c");
    }
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      (g(m) < 0.0 ? a : b) = m;
    }
    lambda = 0.5 * (a + b);
  }
  const double F = log_mgf(w.y, lambda);

  if (r.reflected) {
    r.lo = -hi;
    r.hi = -lo;
    r.lambda = -lambda;
  } else {
    r.lo = lo;
    r.hi = hi;
    r.lambda = lambda;
  }
  r.log_norm = F;
  for (const auto& a : r.atoms) r.density.push_back(r.f(a.value));
  return r;
}

bool TiltReport::all_hold() const {
  bool ok = second_moment_bound.holds && improved_bound.holds && lambda_bound.holds;
  for (const auto& [p, b] : density_power) ok = ok && b.holds;
  return ok;
}

double tilt_constant_p(double p, double A, double epsilon) {
  return 4.0 * std::exp(std::abs(p)) / (A * epsilon);
}

namespace {

TiltBound bound(double lhs, double rhs) {
  return {lhs, rhs, lhs <= rhs + kSlack * std::max(1.0, std::abs(rhs))};
}

bool sign_condition(std::span<const Atom> atoms) {
  std::vector<Atom> pos;
  std::vector<Atom> neg;
  double pp = 0.0;
  double pn = 0.0;
  for (const auto& a : atoms) {
    if (a.value > 0.0) {
      pos.push_back(a);
      pp += a.prob;
    } else if (a.value < 0.0) {
      neg.push_back(a);
      pn += a.prob;
    }
  }
  if (!(pp > 0.0 && pn > 0.0)) return false;
  for (auto& a : pos) a.prob /= pp;
  for (auto& a : neg) a.prob /= pn;
  return variance(pos) > 0.0 && variance(neg) > 0.0;
}

}  // namespace

TiltReport verify_tilt_bounds(const TiltResult& result, const DiscreteLaw& law,
                              const std::vector<double>& p_list) {
  TiltReport rep;
  rep.mean = law.mean();
  rep.second_moment = law.second_moment();
  rep.tilted_mean = result.tilted_mean();
  rep.tilted_second_moment = result.tilted_second_moment();
  const double mu2 = rep.mean * rep.mean;

  for (double p : p_list) {
    double e = 0.0;
    for (const auto& a : law.atoms()) e += a.prob * std::pow(result.f(a.value), p);
    rep.density_power[p] = bound(e, 1.0 + tilt_constant_p(p, result.A, result.epsilon) * mu2);
  }

  rep.C = std::pow(result.A, 1.5) / std::sqrt(result.epsilon);
  rep.second_moment_bound =
      bound(rep.tilted_second_moment, rep.second_moment + rep.C * std::abs(rep.mean));

  std::vector<Atom> work(law.atoms().begin(), law.atoms().end());
  if (rep.mean < 0.0) work = reflect(work);
  double ppos = 0.0;
  double m2pos = 0.0;
  for (const auto& a : work) {
    if (a.value >= 0.0) {
      ppos += a.prob;
      m2pos += a.prob * a.value * a.value;
    }
  }
  rep.epsilon_prime = 0.0;
  rep.C_prime = std::numeric_limits<double>::infinity();
  if (ppos > 0.0 && m2pos > 0.0) {
    const double A1 = one_sided_A(work);
    const double cond = m2pos / ppos;
    rep.epsilon_prime = cond * cond / (144.0 * std::pow(A1, 3));
    rep.C_prime = A1 / (2.0 * ppos * rep.epsilon_prime);
  }
  rep.improved_bound = bound(rep.tilted_second_moment, rep.second_moment + rep.C_prime * mu2);
  rep.sign_condition = sign_condition(law.atoms());
  rep.lambda_bound = bound(std::abs(result.lambda), 1.0 / (27.0 * result.A));
  return rep;
}

FamilyTilt tilt_family(const VariableFamily& family, const std::vector<double>& p_list,
                       TiltInterval interval) {
  FamilyTilt out;
  std::string failed;
  bool all_sign = true;
  for (const auto& m : family.members()) {
    try {
      auto r = tilt_zero_mean(m.law, interval);
      auto rep = verify_tilt_bounds(r, m.law, p_list);
      out.C_max = std::max(out.C_max, rep.C);
      for (double p : p_list) {
        auto& c = out.C_p_max[p];
        c = std::max(c, tilt_constant_p(p, r.A, r.epsilon));
      }
      all_sign = all_sign && rep.sign_condition;
      out.sites.push_back(m.site);
      out.results.push_back(std::move(r));
      out.reports.push_back(std::move(rep));
    } catch (const PreconditionError&) {
      failed += (failed.empty() ? "" : ",") + std::to_string(m.site);
    }
  }
  if (!failed.empty()) throw PreconditionError("tilt hypothesis fails at sites " + failed);
  if (all_sign) {
    double c = 0.0;
    for (const auto& rep : out.reports) c = std::max(c, rep.C_prime);
    out.C_prime_max = c;
  }
  return out;
}

}  // namespace chaoslim
