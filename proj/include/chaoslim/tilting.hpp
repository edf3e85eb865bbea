#pragma once

// Exponential tilting of a finitely supported law on a bounded window, to
// remove its mean while keeping the second moment and density powers close
// to those of the original law.

#include <map>
#include <optional>
#include <vector>

#include "chaoslim/chaos_core.hpp"
#include "chaoslim/laws.hpp"

namespace chaoslim {

enum class TiltInterval { two_sided, one_sided };

/// Smallest atom magnitude A > 0 with E[X² 1{|X|>A}] ≤ ¼E[X²] (two-sided), or
/// E[X² 1{X>A}] ≤ ¼E[X² 1{X≥0}] after reflecting so that E[X] ≥ 0 (one-sided).
double choose_A(const DiscreteLaw& law, TiltInterval interval = TiltInterval::two_sided);

struct TiltBound {
  double lhs;
  double rhs;
  bool holds;
};

struct TiltResult {
  TiltInterval interval;
  /// True when the law was reflected (E[X] < 0 on the one-sided window).
  bool reflected = false;
  double A;
  double lo;  ///< window [lo, hi]
  double hi;
  double epsilon;
  double lambda;      ///< λ̃
  double log_norm;    ///< F(λ̃)
  double bracket;     ///< c = Var(Y)/(12A³)
  std::vector<Atom> atoms;
  std::vector<double> density;  ///< f at each atom

  /// f(x); 1 outside the window.
  double f(double x) const;
  double tilted_mean() const;
  double tilted_second_moment() const;
  double normalization() const;
};

/// Solves F′(λ̃) − F′(0) = −E[X]/P(X∈I) by bisection on |λ| ≤ Var(Y)/(12A³).
/// Throws PreconditionError when the mean is too large for the window.
TiltResult tilt_zero_mean(const DiscreteLaw& law,
                          TiltInterval interval = TiltInterval::two_sided);

struct TiltReport {
  double mean;
  double second_moment;
  double tilted_mean;
  double tilted_second_moment;
  double C;
  double C_prime;
  double epsilon_prime;
  bool sign_condition;
  std::map<double, TiltBound> density_power;  ///< p ↦ E[f^p] ≤ 1 + C_p E[X]²
  TiltBound second_moment_bound;              ///< E[X̃²] ≤ E[X²] + C|E[X]|
  TiltBound improved_bound;                   ///< E[X̃²] ≤ E[X²] + C′E[X]²
  TiltBound lambda_bound;                     ///< |λ̃| ≤ 1/(27A)

  bool all_hold() const;
};

double tilt_constant_p(double p, double A, double epsilon);

TiltReport verify_tilt_bounds(const TiltResult& result, const DiscreteLaw& law,
                              const std::vector<double>& p_list);

struct FamilyTilt {
  std::vector<Site> sites;
  std::vector<TiltResult> results;
  std::vector<TiltReport> reports;
  double C_max = 0.0;
  std::map<double, double> C_p_max;
  /// Present when every site satisfies the sign condition.
  std::optional<double> C_prime_max;
};

/// Tilts every member; collects all failing sites into one PreconditionError.
FamilyTilt tilt_family(const VariableFamily& family, const std::vector<double>& p_list,
                       TiltInterval interval = TiltInterval::two_sided);

}  // namespace chaoslim
