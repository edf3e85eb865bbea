#include "chaoslim/rng.hpp"

#include <cmath>
#include <numbers>

namespace chaoslim {

double CounterRng::normal() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

double keyed_normal(std::uint64_t key, std::uint64_t index) noexcept {
  const std::uint64_t base = mix64(key ^ mix64(2 * index));
  const double u1 = to_unit_open(base);
  const double u2 = to_unit_open(mix64(base ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace chaoslim
