#pragma once

// Critical 2D Ising model with + boundary on small lattice domains, solved by
// exact enumeration, and the random-field partition function built on it.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "chaoslim/chaos_core.hpp"

namespace chaoslim {

/// ½ log(1 + √2).
extern const double kBetaCritical;
/// 2^{5/48} e^{−3ζ′(−1)/2}, with ζ′(−1) = 1/12 − log(Glaisher's constant).
extern const double kIsingCorrelationConstant;

using LatticePoint = std::pair<int, int>;

struct Point2 {
  double x;
  double y;
};

/// Axis-aligned open rectangle (x0, x1) × (y0, y1).
struct Rect {
  double x0;
  double y0;
  double x1;
  double y1;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(const Point2& p) const { return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1; }
  double boundary_distance(const Point2& p) const;
};

class LatticeSpinSystem {
 public:
  static constexpr std::size_t kDefaultCap = 20;

  /// Interior sites (i, j), 1 ≤ i ≤ width, 1 ≤ j ≤ height, mesh δ. The
  /// continuum domain is (0, (width+1)δ) × (0, (height+1)δ).
  static LatticeSpinSystem rectangle(int width, int height, double delta = 1.0,
                                     std::size_t cap = kDefaultCap);
  /// Arbitrary finite set of interior sites; the boundary is their
  /// nearest-neighbour hull.
  static LatticeSpinSystem from_sites(std::vector<LatticePoint> sites, double delta = 1.0,
                                      std::size_t cap = kDefaultCap);

  std::size_t size() const { return sites_.size(); }
  const std::vector<LatticePoint>& sites() const { return sites_; }
  const std::vector<LatticePoint>& boundary() const { return boundary_; }
  double delta() const { return delta_; }
  std::optional<Rect> domain() const { return domain_; }
  /// Index of a site, or nullopt when it is not interior.
  std::optional<std::size_t> index_of(LatticePoint p) const;
  Point2 position(std::size_t i) const;

  /// Gibbs weights of all 2^n configurations; bit i set means σ_i = −1.
  const std::vector<double>& probabilities() const;

  /// E⁺[∏_{i∈I} σ_i]; ResourceError above the enumeration cap.
  double correlation(const std::vector<std::size_t>& indices) const;
  double correlation_at(const std::vector<LatticePoint>& points) const;
  /// E⁺[σ^I] for every subset mask I, by a Walsh–Hadamard transform.
  std::vector<double> all_correlations() const;

 private:
  void enumerate();

  std::vector<LatticePoint> sites_;
  std::vector<LatticePoint> boundary_;
  double delta_ = 1.0;
  std::size_t cap_ = kDefaultCap;
  std::optional<Rect> domain_;
  std::vector<double> prob_;
};

/// E⁺[exp Σ ξ_x σ_x].
double rfim_partition(const LatticeSpinSystem& system, const std::vector<double>& xi);

struct ChaosRewrite {
  double prefactor;  ///< ∏ cosh ξ_x
  Kernel kernel;     ///< I ↦ E⁺[σ^I], sites are interior indices
};

/// Z = prefactor · Σ_I kernel(I) tanh(ξ)^I.
ChaosRewrite chaos_rewrite(const LatticeSpinSystem& system, const std::vector<double>& xi);

struct FieldProfiles {
  std::function<double(double, double)> lambda_hat;
  std::function<double(double, double)> h_hat;

  static FieldProfiles constant(double lambda_hat, double h_hat);
};

struct SiteFields {
  std::vector<double> lambda;
  std::vector<double> h;
};

/// λ = λ̂ δ^{7/8}, h = ĥ δ^{15/8} at every interior site.
SiteFields scale_fields(const FieldProfiles& profiles, const LatticeSpinSystem& system);

/// ξ_x = λ_x ω_x + h_x.
std::vector<double> field_xi(const SiteFields& fields, const std::vector<double>& omega);

/// exp(−½ ‖λ̂‖² δ^{−1/4}) with ‖λ̂‖² by midpoint quadrature on δ-cells of `domain`.
double normalization_prefactor(const FieldProfiles& profiles, const Rect& domain, double delta);

struct Subdomain {
  std::vector<LatticePoint> sites;
  LatticePoint marked;
};

struct DecouplingCheck {
  double lhs;
  double rhs;
  bool holds;
};

/// 0 ≤ E⁺_Ω[∏σ_{x_i}] ≤ ∏ E⁺_{Ω_i}[σ_{x_i}]. Subdomains must lie in the system,
/// contain their marked site and satisfy Ω_i ∩ (Ω_j ∪ ∂Ω_j) = ∅ for i ≠ j.
DecouplingCheck gks_decoupling_check(const LatticeSpinSystem& system,
                                     const std::vector<Subdomain>& parts);

/// ∏ d(x_i, ∂Ω ∪ I∖{x_i})^{−1/8}.
double f_omega(const std::vector<Point2>& points, const Rect& domain);

struct McEstimate {
  double value;
  double std_error;
};

/// ‖f_Ω‖²_{L²(Ω^n)} / ‖f_Ω‖²_{L²(Ω^{n−1})} by Monte Carlo (‖·‖_{Ω^0} = 1).
McEstimate f_omega_l2_ratio(const Rect& domain, std::size_t n, std::size_t samples,
                            std::uint64_t seed);

/// Smallest C with δ^{−n/8} E⁺[σ^I] ≤ C^n f_Ω(I) over all I with |I| ≤ max_order.
double correlation_bound_constant(const LatticeSpinSystem& system, std::size_t max_order);

}  // namespace chaoslim
