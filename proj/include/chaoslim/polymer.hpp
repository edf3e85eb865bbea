#pragma once

// Directed polymer (and its long-range variant) on Z: walk laws, transition
// probabilities, space-time partition functions, kernels, second moments.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "chaoslim/chaos_core.hpp"
#include "chaoslim/disorder.hpp"
#include "chaoslim/stable.hpp"

namespace chaoslim {

/// Probability mass function on the integers {offset, …, offset + size − 1}.
struct Pmf {
  std::int64_t offset = 0;
  std::vector<double> p;

  double at(std::int64_t k) const;
  std::int64_t lo() const { return offset; }
  std::int64_t hi() const { return offset + static_cast<std::int64_t>(p.size()) - 1; }
  double total() const;
};

/// Increment law of a zero-mean walk in the normal domain of attraction.
class WalkLaw {
 public:
  static WalkLaw simple();
  /// Finite-variance law from an explicit pmf (α = 2).
  static WalkLaw from_pmf(Pmf pmf);
  /// P(±n) = c(1±γ) n^{−1−α} for 2 ≤ n ≤ window with total mass ½, and the
  /// remaining ½ on ±1 split so the mean is zero. Tail constant C = 2c/α.
  static WalkLaw heavy_tail(double alpha, double gamma, std::int64_t window);

  const Pmf& pmf() const { return pmf_; }
  double alpha() const { return spec_.alpha; }
  int period() const { return period_; }
  /// S_1 ∈ pℤ + r almost surely.
  int residue() const { return residue_; }
  double variance() const { return variance_; }
  /// Parameters of the limiting density g.
  const StableSpec& limit() const { return spec_; }
  /// True when (n, k) lies on the lattice pℤ + rn.
  bool on_lattice(std::int64_t n, std::int64_t k) const;

 private:
  Pmf pmf_;
  int period_ = 1;
  int residue_ = 0;
  double variance_ = 0.0;
  StableSpec spec_;
};

/// q_n(·) = law of S_n.
Pmf walk_pmf(const WalkLaw& law, std::size_t n);
/// q_0 … q_n.
std::vector<Pmf> walk_pmfs(const WalkLaw& law, std::size_t n);

/// sup over lattice k of |n^{1/α} q_n(k) − p g(k/n^{1/α})|.
double gnedenko_gap(const WalkLaw& law, std::size_t n);

/// β̂ N^{−(α−1)/(2α)}.
double scale_beta(double alpha, double beta_hat, std::size_t n);

enum class PolymerMode { free, point2point, conditioned };

/// ω(n, x) for n ≥ 1.
using SpaceTimeField = std::function<double(std::int64_t n, std::int64_t x)>;

/// I.i.d. field keyed by (seed, n, x).
SpaceTimeField keyed_field(const DisorderLaw& disorder, std::uint64_t seed);

/// Space-time DP over the full support. `y` is required for the endpoint modes.
double polymer_partition(const WalkLaw& law, const DisorderLaw& disorder,
                         const SpaceTimeField& omega, double beta, std::size_t n,
                         PolymerMode mode, std::optional<std::int64_t> y = std::nullopt);

/// Encodes a space-time site (n, k) with |k| ≤ radius as a kernel site id.
Site polymer_site(std::int64_t n, std::int64_t k, std::int64_t radius);

/// Exhaustive chaos kernel in the variables e^{βω−Λ(β)} − 1 (N·window small).
/// Site ids follow polymer_site with radius N·max|step|.
Kernel polymer_chaos_kernel(const WalkLaw& law, std::size_t n, PolymerMode mode,
                            std::optional<std::int64_t> y = std::nullopt);

struct SpaceTimePoint {
  double t;
  double x;
};

/// Rescaled discrete kernel ψ_N. Points on T_N with t ∈ (0,1]; the endpoint
/// x is used in conditioned mode. Zero on coincident times.
double polymer_kernel_discrete(const WalkLaw& law, std::size_t n,
                               std::vector<SpaceTimePoint> points, double x,
                               PolymerMode mode = PolymerMode::conditioned);

/// ∏ √p g_{Δt}(Δx), times g_{t−t_k}(x−x_k)/g_t(x) in conditioned mode.
double polymer_kernel_continuum(const WalkLaw& law, std::vector<SpaceTimePoint> points,
                                double t, double x,
                                PolymerMode mode = PolymerMode::conditioned);

struct PolymerSecondMomentOptions {
  /// Largest |S − S′| tracked; 0 picks the full support when it fits in
  /// max_states and a ±⌈4N^{1/α}·scale⌉ window otherwise.
  std::int64_t window = 0;
  std::size_t max_states = 2'000'001;
  double max_lost_mass = 1e-8;
};

/// E[Z_free²] = E[exp(c·#{n ≤ N: S_n = S′_n})], c = Λ(2β) − 2Λ(β).
double polymer_second_moment_exact(const WalkLaw& law, const DisorderLaw& disorder,
                                   std::size_t n, double beta,
                                   PolymerSecondMomentOptions opts = {});

/// 1 + Σ_k (pβ̂²c_g)^k Γ(1−1/α)^k t^{k(1−1/α)}/Γ(k(1−1/α)+1), c_g = ∫g².
double polymer_second_moment_continuum(const WalkLaw& law, double beta_hat, double t,
                                       std::size_t k_max = 400);

}  // namespace chaoslim
