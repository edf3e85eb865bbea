#pragma once

#include <cstddef>
#include <span>

namespace chaoslim {

/// ∫ over 0<t₁<…<t_k<t of ∏_{i≤k+1} (t_i − t_{i−1})^{a_i − 1}, with t₀ = 0 and
/// t_{k+1} = t, which equals t^{Σa − 1}·∏Γ(a_i)/Γ(Σa). Every a_i must be > 0.
double dirichlet_integral(std::span<const double> exponents, double t = 1.0);

/// Symmetric case a_i = 1 − χ for all k+1 gaps: Γ(1−χ)^{k+1}/Γ((k+1)(1−χ)).
double dirichlet_symmetric(std::size_t k, double chi);

/// k gaps of exponent 1 − χ and a free end: Γ(1−χ)^k/Γ(k(1−χ)+1)·t^{k(1−χ)}.
double dirichlet_free_end(std::size_t k, double chi, double t = 1.0);

}  // namespace chaoslim
