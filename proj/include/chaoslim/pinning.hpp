#pragma once

// Disordered pinning model: renewal laws, transfer-matrix partition
// functions, discrete and continuum chaos kernels, exact second moments.

#include <cstddef>
#include <span>
#include <vector>

#include "chaoslim/chaos_core.hpp"
#include "chaoslim/disorder.hpp"

namespace chaoslim {

enum class Regime { finite_mean, alpha };
enum class PinMode { free, conditioned };

/// Law of the inter-arrival time τ₁ on {1, …, n_max}.
class RenewalLaw {
 public:
  /// jumps[n-1] = P(τ₁ = n). Must sum to 1 and be aperiodic.
  static RenewalLaw from_jumps(std::vector<double> jumps);
  /// K(n) = L n^{-1-α} for n < n_max with L = 1/ζ(1+α); the remaining tail
  /// mass sits on n_max. Requires ½ < α < 1 (α ≤ ½ is a DomainError).
  static RenewalLaw alpha_law(double alpha, std::size_t n_max);

  Regime regime() const { return regime_; }
  double alpha() const { return alpha_; }
  /// Constant slowly varying function L (1 for finite-mean laws).
  double slowly_varying() const { return l_; }
  std::size_t n_max() const { return jumps_.size(); }
  double jump(std::size_t n) const;
  /// P(τ₁ > n).
  double survival(std::size_t n) const;
  /// E[τ₁]; InputError in the α regime.
  double mean() const;

 private:
  std::vector<double> jumps_;
  std::vector<double> survival_;
  Regime regime_ = Regime::finite_mean;
  double alpha_ = 0.0;
  double l_ = 1.0;
};

/// u(0..N) with u(0) = 1 and u(n) = Σ K(m) u(n−m).
std::vector<double> renewal_mass(const RenewalLaw& law, std::size_t n);

/// α sin(πα)/π.
double alpha_constant(double alpha);

/// a_N: 1/√N for finite mean, L·N^{½−α} in the α regime.
double coupling_scale(const RenewalLaw& law, std::size_t n);

struct Couplings {
  double beta;
  double h;
};
Couplings scale_couplings(const RenewalLaw& law, double beta_hat, double h_hat, std::size_t n);

/// Caches u(·) for repeated partition-function evaluations of size N.
class PinningSystem {
 public:
  PinningSystem(RenewalLaw law, std::size_t n);

  const RenewalLaw& law() const { return law_; }
  std::size_t size() const { return n_; }
  std::span<const double> mass() const { return u_; }

  /// Transfer recursion; omega holds ω_1..ω_N. Conditioned mode throws
  /// ConditioningError when u(N) = 0.
  double partition(std::span<const double> omega, double beta, double lambda_beta, double h,
                   PinMode mode) const;

 private:
  RenewalLaw law_;
  std::size_t n_;
  std::vector<double> u_;
};

double partition_function(const RenewalLaw& law, const DisorderLaw& disorder,
                          std::span<const double> omega, double beta, double h, PinMode mode);

/// ε_n = e^{βω_n − Λ(β) + h} − 1 for n = 1..N, stored at index n−1.
std::vector<double> chaos_variables(const DisorderLaw& disorder, std::span<const double> omega,
                                    double beta, double h);

/// Exhaustive kernel on sites 1..N (N ≤ 20) with Z = Σ_I ψ(I) ε^I; includes ∅ ↦ 1.
Kernel chaos_kernel(const RenewalLaw& law, std::size_t n, PinMode mode);

/// ψ_N(t₁,…,t_k) for times on the lattice (1/N)ℤ ∩ (0,1]. Symmetric; zero on
/// coincident times.
double discrete_kernel(const RenewalLaw& law, std::size_t n, std::vector<double> times,
                       PinMode mode = PinMode::conditioned);

/// Continuum kernel on 0 < t₁ < … < t_k < t (t_k = t allowed in free mode).
double continuum_kernel(const RenewalLaw& law, std::vector<double> times, double t,
                        PinMode mode = PinMode::conditioned);

/// E[Z] at β = 0.
double first_moment(const RenewalLaw& law, std::size_t n, double h, PinMode mode);

enum class SecondMomentMethod { automatic, pair_age, intersection };

struct SecondMomentOptions {
  SecondMomentMethod method = SecondMomentMethod::automatic;
  std::size_t state_cap = 4'000'000;
};

/// E[Z²] over the disorder, exactly. The intersection method needs h = 0.
double second_moment_exact(const RenewalLaw& law, const DisorderLaw& disorder, std::size_t n,
                           double beta, double h, PinMode mode, SecondMomentOptions opts = {});

/// E[Z̄²] of the continuum limit at time t.
double continuum_second_moment(const RenewalLaw& law, double beta_hat, double h_hat, double t,
                               PinMode mode = PinMode::conditioned, std::size_t k_max = 200);

struct LognormalLaw {
  double drift;
  double volatility;
  double cdf(double z) const;
  double mean() const;
};

LognormalLaw lognormal_limit_law(double mean_tau, double beta_hat, double h_hat, double t);

}  // namespace chaoslim
