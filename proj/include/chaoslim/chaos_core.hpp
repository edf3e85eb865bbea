#pragma once

// Sparse multilinear polynomials ("polynomial chaos") and the two
// Lindeberg-type distance bounds between chaos expansions evaluated on
// different independent input families.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "chaoslim/laws.hpp"

namespace chaoslim {

using Site = std::int64_t;

/// Finite set of sites, stored as a strictly increasing sequence.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<Site> sites);
  /// Sorts the input; duplicate sites are an InputError.
  explicit IndexSet(std::vector<Site> sites);

  std::span<const Site> sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  bool contains(Site s) const;

  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  friend auto operator<=>(const IndexSet&, const IndexSet&) = default;
  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<Site> sites_;
};

using SiteValues = std::map<Site, double>;

/// Kernel ψ of a multilinear polynomial Ψ(x) = Σ_I ψ(I) x^I.
///
/// Immutable after construction. Zero coefficients are dropped; duplicate
/// index sets passed to `from_entries` are summed. When a universe is given,
/// every referenced site must belong to it.
class Kernel {
 public:
  using Entries = std::map<IndexSet, double>;

  Kernel() = default;
  explicit Kernel(Entries entries, std::optional<std::size_t> degree_bound = std::nullopt,
                  std::optional<std::vector<Site>> universe = std::nullopt);
  static Kernel from_entries(std::span<const std::pair<IndexSet, double>> entries);

  const Entries& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Coefficient of I, zero when absent.
  double coefficient(const IndexSet& set) const;
  /// Advisory only.
  std::optional<std::size_t> degree_bound() const { return degree_bound_; }
  std::size_t degree() const;
  /// Sorted list of sites referenced by some entry.
  std::vector<Site> support() const;

  Kernel scaled(double a) const;
  friend Kernel operator+(const Kernel& a, const Kernel& b);

 private:
  Entries entries_;
  std::optional<std::size_t> degree_bound_;
};

/// Σ_I ψ(I) ∏_{i∈I} x_i with x^∅ = 1. Missing site value is an InputError.
double eval_multilinear(const Kernel& kernel, const SiteValues& values);
/// Dense variant: site s reads values[s].
double eval_multilinear(const Kernel& kernel, std::span<const double> values);

/// C_Ψ = Σ_{I≠∅} ψ(I)². The constant term is excluded.
double c_psi(const Kernel& kernel);

/// Inf_i[Ψ] = Σ_{I∋i} ψ(I)².
double influence(const Kernel& kernel, Site site);
double max_influence(const Kernel& kernel);

struct TruncatedKernel {
  Kernel low;   ///< entries with |I| ≤ ℓ
  Kernel high;  ///< entries with |I| > ℓ
};
TruncatedKernel truncate(const Kernel& kernel, std::size_t degree);

/// Scales ψ(I) by (1+ε)^{|I|/2}.
Kernel epsilon_inflate(const Kernel& kernel, double eps);

/// Kernel of x ↦ Ψ(x + μ): ψ̃(J) = Σ_{I⊇J} ψ(I) μ^{I∖J}.
Kernel shift_kernel(const Kernel& kernel, const SiteValues& mu);

// ---------------------------------------------------------------------------
// Truncated moments and Lindeberg bounds

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct TruncatedMoments {
  double m2_above = 0.0;   ///< sup E[X² 1{|X|>M}]
  double m3_below = 0.0;   ///< sup E[|X|³ 1{|X|≤M}]
  double threshold = kInfinity;
};

/// Laws must be centered with unit variance (tolerance 1e-8); the empirical
/// variant expects samples already standardized.
TruncatedMoments truncated_moments(std::span<const UnivariateLaw> laws, double threshold);

/// Thresholds M from `grid` for which m₂^{>M} ≤ ¼ holds.
std::vector<double> feasible_thresholds(std::span<const UnivariateLaw> laws,
                                        std::span<const double> grid);

/// Zero-mean Lindeberg bound:
///   C_f { 2√C_{Ψ>ℓ} + C_{Ψ≤ℓ}·16ℓ²·m₂ + C_{Ψ≤ℓ}·70^{ℓ+1}·m₃^ℓ·√max_i Inf_i[Ψ≤ℓ] }.
/// Throws PreconditionError when m₂^{>M} > ¼.
double lindeberg_bound(const Kernel& kernel, std::size_t degree, const TruncatedMoments& moments,
                       double c_f);

/// Non-zero-mean bound: e^{2c_μ/ε} times the zero-mean bound for Ψ^{(ε)}.
double lindeberg_bound_mean(const Kernel& kernel, double eps, double c_mu, std::size_t degree,
                            const TruncatedMoments& moments, double c_f);

// ---------------------------------------------------------------------------

/// Independent variables ζ_i with per-site laws and a shared variance.
class VariableFamily {
 public:
  struct Member {
    Site site;
    DiscreteLaw law;
  };

  /// Throws InputError when the variances differ by more than 1e-9 relative.
  explicit VariableFamily(std::vector<Member> members);

  std::span<const Member> members() const { return members_; }
  double variance() const { return variance_; }
  double mean(Site site) const;
  SiteValues means() const;
  /// c_μ = Σ μ_i².
  double c_mu() const;

 private:
  std::vector<Member> members_;
  double variance_ = 0.0;
};

// ---------------------------------------------------------------------------
// Line format: `i1,i2,...,ik<TAB>coefficient`, `-` for the empty set.

void write_kernel(std::ostream& out, const Kernel& kernel);
Kernel read_kernel(std::istream& in);

}  // namespace chaoslim
