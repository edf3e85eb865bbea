#pragma once

#include <vector>

namespace chaoslim {

/// Limit law of S_n/n^{1/α}: Gaussian N(0, σ²) when α = 2, otherwise the
/// stable law with E[e^{itY}] = exp(−c_α C |t|^α (1 − iγ sign(t) tan(πα/2))),
/// c_α = Γ(1−α) cos(πα/2).
struct StableSpec {
  double alpha = 2.0;
  double sigma2 = 1.0;
  double gamma = 0.0;
  double c = 1.0;

  static StableSpec gaussian(double sigma2);
  static StableSpec stable(double alpha, double gamma, double c);
  /// Throws InputError outside α ∈ (1,2], |γ| ≤ 1, positive scales.
  void validate() const;
  /// c_α·C (α < 2).
  double scale() const;
};

double stable_constant(double alpha);

/// g(x). Throws NumericError when the inversion integral misses 1e-10.
double stable_density(const StableSpec& spec, double x);
/// g_t(x) = t^{−1/α} g(x / t^{1/α}).
double stable_density_t(const StableSpec& spec, double t, double x);
/// Gil–Pelaez inversion of the characteristic function.
double stable_cdf(const StableSpec& spec, double x);
/// ∫ g(x)² dx = (1/π) Γ(1+1/α) (2 c_α C)^{−1/α}, or 1/(2σ√π) when α = 2.
double stable_l2_norm_sq(const StableSpec& spec);

/// Cached table of g on a symmetric uniform grid.
class StableDensity {
 public:
  StableDensity(StableSpec spec, double half_width, std::size_t points);

  const StableSpec& spec() const { return spec_; }
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return g_; }
  /// Linear interpolation in the table, direct evaluation outside it.
  double operator()(double x) const;
  /// Trapezoid mass of the table.
  double mass() const;

 private:
  StableSpec spec_;
  std::vector<double> x_;
  std::vector<double> g_;
};

}  // namespace chaoslim
