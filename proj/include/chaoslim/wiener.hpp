#pragma once

// Gridded white noise on a box in R^d, off-diagonal multiple integrals and
// (biased) Wiener chaos series built from them.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "chaoslim/pinning.hpp"

namespace chaoslim {

using Point = std::vector<double>;

/// Uniform tessellation of the box ∏[lo_a, hi_a) into ∏ n_a congruent cells.
class Tessellation {
 public:
  Tessellation(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> cells);
  /// [0, 1)^d split into n cells per axis.
  static Tessellation unit_cube(std::size_t d, std::size_t n_per_axis);

  std::size_t dimension() const { return lo_.size(); }
  std::size_t size() const { return count_; }
  double cell_volume() const { return volume_; }
  double box_volume() const { return volume_ * static_cast<double>(count_); }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  const std::vector<std::size_t>& cells_per_axis() const { return cells_; }
  /// Row-major with the first axis slowest.
  Point center(std::size_t cell) const;
  /// Halves every cell side.
  Tessellation refined() const;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<std::size_t> cells_;
  std::size_t count_ = 0;
  double volume_ = 0.0;
};

/// W(C) for every cell C: i.i.d. N(0, v), keyed by (seed, cell index).
class GridWhiteNoise {
 public:
  GridWhiteNoise(Tessellation tess, std::uint64_t seed);

  const Tessellation& tessellation() const { return tess_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t cell) const { return values_[cell]; }
  /// W(g) with g evaluated at cell centres.
  double integrate(const std::function<double(const Point&)>& g) const;
  /// W(box) for the cells whose centres lie in [lo, hi).
  double box(const std::vector<double>& lo, const std::vector<double>& hi) const;

 private:
  Tessellation tess_;
  std::uint64_t seed_;
  std::vector<double> values_;
};

GridWhiteNoise sample_noise(const Tessellation& tess, std::uint64_t seed);

/// `cell_index,x_center_1,…,x_center_d,value`.
void write_noise_csv(std::ostream& out, const GridWhiteNoise& noise);

/// Symmetric function on k-tuples of cells, stored densely (n^k values).
class GriddedKernel {
 public:
  static constexpr std::size_t kMaxEntries = 1u << 24;

  GriddedKernel() = default;
  /// Constant (k = 0).
  explicit GriddedKernel(double c);
  GriddedKernel(std::size_t degree, std::size_t cells, std::vector<double> values);
  /// Samples f at cell centres.
  static GriddedKernel from_function(const Tessellation& tess, std::size_t degree,
                                     const std::function<double(std::span<const Point>)>& f);

  std::size_t degree() const { return degree_; }
  std::size_t cells() const { return cells_; }
  double at(std::span<const std::size_t> tuple) const;
  /// Σ over distinct tuples of f² · v^k.
  double norm_sq(double cell_volume) const;
  /// Max |f(c) − f(π c)| over sampled tuples and permutations.
  double asymmetry(std::uint64_t seed = 1, std::size_t probes = 256) const;

 private:
  std::size_t degree_ = 0;
  std::size_t cells_ = 0;
  std::vector<double> values_{0.0};
};

/// Σ over ordered k-tuples of pairwise distinct cells of f · ∏ W(C_i).
/// Throws InputError when f is not symmetric to 1e-12.
double multiple_integral(const GriddedKernel& f, const GridWhiteNoise& noise);

/// Same sum with arbitrary per-cell weights a_c in place of W(C).
double distinct_tuple_sum(const GriddedKernel& f, std::span<const double> weights);

/// f_k(y_1..y_k) = coefficient(k) ∏ g(y_i).
struct ProductKernel {
  std::function<double(std::size_t)> coefficient;
  std::function<double(const Point&)> g;
};

struct ChaosSeriesSpec {
  double sigma0 = 1.0;
  /// μ̄₀; empty means no bias.
  std::function<double(const Point&)> bias;
  std::size_t k_max = 8;
  /// Degree-k kernel at index k; used when `product` is absent.
  std::vector<GriddedKernel> kernels;
  std::optional<ProductKernel> product;
  /// ‖f_k‖²_{L²} of the continuum kernels, for the tail bound and the L² check.
  std::function<double(std::size_t)> norm_sq;

  bool biased() const { return static_cast<bool>(bias); }
};

struct ChaosEval {
  double value;
  /// Σ_{k>k_max} σ̄₀^{2k}‖f_k‖²/k!; NaN when norm_sq is not supplied.
  double tail_bound;
};

/// Σ_{k ≤ k_max} (1/k!) Σ_{distinct tuples} f_k ∏ (σ̄₀ W(C_i) + μ̄₀(c_i) v).
ChaosEval chaos_series_eval(const ChaosSeriesSpec& spec, const GridWhiteNoise& noise);

/// The summability check Σ (1+ε)^k σ̄₀^{2k}‖f_k‖²/k! < ∞, ε = 0.1 with bias, 0 without.
void check_l2_condition(const ChaosSeriesSpec& spec);

/// Elementary symmetric polynomials e_0 … e_kmax of `x`.
std::vector<double> elementary_symmetric(std::span<const double> x, std::size_t k_max);

/// exp(W(ν) − ½‖ν‖²), ν evaluated at cell centres.
double cameron_martin_weight(const GridWhiteNoise& noise,
                             const std::function<double(const Point&)>& nu);

/// exp{ρζ(ĥ − ½ρλ̂²(1−ζ)) vol}.
double factorized_moment(double rho, double lambda_hat, double h_hat, double zeta,
                         double volume);

/// Law of exp{ρλ̂W(Ω) + (ρĥ − ½ρ²λ̂²) vol}.
LognormalLaw factorized_law(double rho, double lambda_hat, double h_hat, double volume);

/// Spec with f_k = ρ^k on the box, σ̄₀ = λ̂, μ̄₀ = ĥ.
ChaosSeriesSpec factorized_spec(const Tessellation& tess, double rho, double lambda_hat,
                                double h_hat, std::size_t k_max = 8);

/// Exact E[Ψ²] of the untruncated grid series for a product kernel with
/// coefficient ρ^k (all degrees), and its continuum counterpart.
double product_grid_second_moment(const Tessellation& tess, double rho,
                                  const ChaosSeriesSpec& spec);
double product_continuum_second_moment(const Tessellation& tess, double rho,
                                       const ChaosSeriesSpec& spec);

}  // namespace chaoslim
