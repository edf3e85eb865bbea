#include "chaoslim/dirichlet.hpp"

#include <cmath>
#include <vector>

#include "chaoslim/errors.hpp"

namespace chaoslim {

double dirichlet_integral(std::span<const double> exponents, double t) {
  if (exponents.empty()) throw InputError("dirichlet integral needs at least one exponent");
  if (!(t > 0.0)) throw InputError("dirichlet integral needs t > 0");
  double log_num = 0.0;
  double sum = 0.0;
  for (double a : exponents) {
    if (!(a > 0.0)) throw DomainError("dirichlet exponent must be positive");
    log_num += std::lgamma(a);
    sum += a;
  }
  return std::exp(log_num - std::lgamma(sum) + (sum - 1.0) * std::log(t));
}

double dirichlet_symmetric(std::size_t k, double chi) {
  std::vector<double> a(k + 1, 1.0 - chi);
  return dirichlet_integral(a);
}

double dirichlet_free_end(std::size_t k, double chi, double t) {
  std::vector<double> a(k, 1.0 - chi);
  a.push_back(1.0);
  return dirichlet_integral(a, t);
}

}  // namespace chaoslim
