#include <doctest.h>

#include <cmath>
#include <vector>

#include "chaoslim/disorder.hpp"
#include "chaoslim/errors.hpp"
#include "chaoslim/pinning.hpp"
#include "chaoslim/rng.hpp"
#include "oracles.hpp"

using namespace chaoslim;

namespace {

RenewalLaw half_half() { return RenewalLaw::from_jumps({0.5, 0.5}); }

// Z by summing over every renewal configuration inside [1, N].
double brute_partition(const RenewalLaw& law, const std::vector<double>& omega, double beta,
                       double lam, double h, PinMode mode) {
  const std::size_t n = omega.size();
  double total = 0.0;
  for (const auto& set : oracle::subsets(n)) {
    double w = 1.0;
    std::int64_t last = 0;
    for (auto t : set) {
      w *= law.jump(static_cast<std::size_t>(t - last)) * std::exp(beta * omega[t - 1] - lam + h);
      last = t;
    }
    if (mode == PinMode::conditioned) {
      if (last != static_cast<std::int64_t>(n)) continue;
    } else {
      w *= law.survival(n - static_cast<std::size_t>(last));
    }
    total += w;
  }
  if (mode == PinMode::conditioned) total /= renewal_mass(law, n)[n];
  return total;
}

}  // namespace

TEST_CASE("disorder cumulants") {
  CHECK(DisorderLaw::gaussian().cumulant(0.7) == doctest::Approx(0.245));
  CHECK(DisorderLaw::rademacher().cumulant(0.7) == doctest::Approx(std::log(std::cosh(0.7))));
  const auto d = DisorderLaw::from_atoms({{-2.0, 0.2}, {0.5, 0.8}});
  CHECK(d.cumulant(0.3) == doctest::Approx(std::log(0.2 * std::exp(-0.6) + 0.8 * std::exp(0.15))));
  CHECK_THROWS_AS(DisorderLaw::from_atoms({{0.0, 0.5}, {2.0, 0.5}}), InputError);
  CHECK_THROWS_AS(DisorderLaw::from_name("cauchy"), InputError);
}

TEST_CASE("renewal laws") {
  const auto law = half_half();
  CHECK(law.mean() == doctest::Approx(1.5));
  CHECK(law.survival(0) == doctest::Approx(1.0));
  CHECK(law.survival(1) == doctest::Approx(0.5));
  CHECK(law.survival(2) == 0.0);
  // u(n) = 2/3 + (1/3)(−1/2)^n for K(1) = K(2) = ½.
  const auto u = renewal_mass(law, 30);
  for (std::size_t n = 0; n <= 30; ++n) {
    CHECK(u[n] == doctest::Approx(2.0 / 3.0 + std::pow(-0.5, static_cast<double>(n)) / 3.0));
  }
  CHECK_THROWS_AS(RenewalLaw::from_jumps({0.5, 0.4}), InputError);
  CHECK_THROWS_AS(RenewalLaw::from_jumps({0.0, 1.0}), InputError);
  CHECK_THROWS_AS(RenewalLaw::alpha_law(0.5, 100), DomainError);
  CHECK_THROWS_AS(RenewalLaw::alpha_law(0.4, 100), DomainError);
  CHECK_THROWS_AS(RenewalLaw::alpha_law(1.2, 100), InputError);
  const auto a = RenewalLaw::alpha_law(0.75, 1000);
  CHECK_THROWS_AS(a.mean(), InputError);
  double total = 0.0;
  for (std::size_t n = 1; n <= a.n_max(); ++n) total += a.jump(n);
  CHECK(total == doctest::Approx(1.0));
  CHECK(a.jump(10) == doctest::Approx(a.slowly_varying() * std::pow(10.0, -1.75)));
}

TEST_CASE("renewal mass approaches the alpha-regime asymptotics") {
  const double alpha = 0.75;
  const std::size_t n = 4000;
  const auto law = RenewalLaw::alpha_law(alpha, n + 1);
  const auto u = renewal_mass(law, n);
  auto rel = [&](std::size_t m) {
    const double target = alpha_constant(alpha) / law.slowly_varying() *
                          std::pow(static_cast<double>(m), alpha - 1.0);
    return std::abs(u[m] / target - 1.0);
  };
  CHECK(rel(4000) < rel(1000));
  CHECK(rel(1000) < rel(250));
  CHECK(rel(4000) < 0.1);
}

TEST_CASE("transfer recursion matches configuration sums") {
  CounterRng rng(5);
  const auto disorder = DisorderLaw::gaussian();
  for (const auto& law : {half_half(), RenewalLaw::from_jumps({0.2, 0.3, 0.1, 0.4}),
                          RenewalLaw::alpha_law(0.7, 20)}) {
    for (std::size_t n : {1u, 4u, 9u}) {
      const auto omega = disorder.sample_n(n, rng);
      for (auto mode : {PinMode::free, PinMode::conditioned}) {
        const double z = partition_function(law, disorder, omega, 0.8, -0.3, mode);
        const double ref = brute_partition(law, omega, 0.8, disorder.cumulant(0.8), -0.3, mode);
        CHECK(z == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("chaos rewrite reproduces the partition function") {
  CounterRng rng(17);
  const auto disorder = DisorderLaw::rademacher();
  const auto law = RenewalLaw::from_jumps({0.3, 0.3, 0.4});
  for (std::size_t n : {3u, 7u, 10u}) {
    for (auto mode : {PinMode::free, PinMode::conditioned}) {
      const auto k = chaos_kernel(law, n, mode);
      CHECK(k.coefficient(IndexSet{}) == doctest::Approx(1.0));
      for (int rep = 0; rep < 5; ++rep) {
        const auto omega = disorder.sample_n(n, rng);
        const auto eps = chaos_variables(disorder, omega, 0.6, 0.1);
        std::vector<double> dense(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) dense[i + 1] = eps[i];
        CHECK(eval_multilinear(k, dense) ==
              doctest::Approx(partition_function(law, disorder, omega, 0.6, 0.1, mode))
                  .epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(chaos_kernel(law, 21, PinMode::free), ResourceError);
}

TEST_CASE("conditioning on a null event") {
  const auto law = RenewalLaw::from_jumps({0.0, 0.5, 0.5});
  const std::vector<double> omega{0.1};
  CHECK_THROWS_AS(partition_function(law, DisorderLaw::gaussian(), omega, 0.5, 0.0,
                                     PinMode::conditioned),
                  ConditioningError);
  CHECK_THROWS_AS(chaos_kernel(law, 1, PinMode::conditioned), ConditioningError);
}

TEST_CASE("first moment") {
  const auto law = RenewalLaw::from_jumps({0.2, 0.3, 0.5});
  CHECK(first_moment(law, 12, 0.0, PinMode::free) == doctest::Approx(1.0));
  CHECK(first_moment(law, 12, 0.0, PinMode::conditioned) == doctest::Approx(1.0));
}

TEST_CASE("exact second moments agree with disorder enumeration") {
  // Rademacher disorder: average Z² over all 2^N sign patterns.
  const auto disorder = DisorderLaw::rademacher();
  const auto law = RenewalLaw::from_jumps({0.4, 0.1, 0.5});
  const std::size_t n = 9;
  const double beta = 0.7;
  for (double h : {0.0, 0.25}) {
    for (auto mode : {PinMode::free, PinMode::conditioned}) {
      double ref = 0.0;
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<double> omega(n);
        for (std::size_t i = 0; i < n; ++i) omega[i] = (mask >> i & 1u) ? 1.0 : -1.0;
        const double z = partition_function(law, disorder, omega, beta, h, mode);
        ref += z * z;
      }
      ref /= static_cast<double>(1u << n);
      CAPTURE(h);
      const double pa = second_moment_exact(law, disorder, n, beta, h, mode,
                                            {SecondMomentMethod::pair_age, 4'000'000});
      CHECK(pa == doctest::Approx(ref).epsilon(1e-12));
      if (h == 0.0) {
        const double in = second_moment_exact(law, disorder, n, beta, h, mode,
                                              {SecondMomentMethod::intersection, 4'000'000});
        CHECK(in == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(second_moment_exact(law, disorder, n, beta, 0.1, PinMode::free,
                                      {SecondMomentMethod::intersection, 4'000'000}),
                  InputError);
  CHECK_THROWS_AS(second_moment_exact(law, disorder, 50, beta, 0.1, PinMode::free,
                                      {SecondMomentMethod::pair_age, 4}),
                  ResourceError);
}

TEST_CASE("coupling scales") {
  const auto law = half_half();
  const auto c = scale_couplings(law, 2.0, 3.0, 100);
  CHECK(c.beta == doctest::Approx(0.2));
  CHECK(c.h == doctest::Approx(0.03));
  const auto a = RenewalLaw::alpha_law(0.75, 200);
  const auto ca = scale_couplings(a, 1.0, 1.0, 100);
  CHECK(ca.beta == doctest::Approx(a.slowly_varying() * std::pow(100.0, -0.25)));
  CHECK(ca.h == doctest::Approx(a.slowly_varying() * std::pow(100.0, -0.75)));
}

TEST_CASE("rescaled discrete kernel approaches the continuum kernel") {
  const std::size_t n = 4000;
  const std::vector<double> times{0.25, 0.5};
  const double scale = static_cast<double>(n);  // N^{k/2} with k = 2
  const auto fm = half_half();
  CHECK(discrete_kernel(fm, n, times) * scale ==
        doctest::Approx(continuum_kernel(fm, times, 1.0)).epsilon(1e-6));
  const auto a = RenewalLaw::alpha_law(0.75, n + 1);
  for (auto mode : {PinMode::free, PinMode::conditioned}) {
    CHECK(discrete_kernel(a, n, times, mode) * scale ==
          doctest::Approx(continuum_kernel(a, times, 1.0, mode)).epsilon(0.05));
  }
  CHECK(discrete_kernel(fm, n, {0.5, 0.5}) == 0.0);
  CHECK_THROWS_AS(discrete_kernel(fm, n, {0.00001}), InputError);
  CHECK_THROWS_AS(continuum_kernel(a, {0.5, 0.5}, 1.0), DomainError);
}

TEST_CASE("continuum second moments") {
  const auto fm = half_half();
  const double rho = 2.0 / 3.0;
  CHECK(continuum_second_moment(fm, 1.0, 0.0, 1.0) == doctest::Approx(std::exp(rho * rho)));
  CHECK(continuum_second_moment(fm, 1.0, 0.5, 2.0) ==
        doctest::Approx(std::exp(2.0 * rho * 0.5 * 2.0 + rho * rho * 2.0)));
  const auto a = RenewalLaw::alpha_law(0.75, 100);
  for (auto mode : {PinMode::free, PinMode::conditioned}) {
    // The Dirichlet series (ĥ = 0) and the fractional-series method (ĥ ≠ 0)
    // are independent code paths and must agree in the limit ĥ → 0.
    const double at0 = continuum_second_moment(a, 0.8, 0.0, 1.0, mode);
    const double near0 = continuum_second_moment(a, 0.8, 1e-7, 1.0, mode);
    CHECK(near0 == doctest::Approx(at0).epsilon(1e-5));
    CHECK(at0 > 1.0);
  }
  // β̂ = 0 reduces to (E Z)² of the continuum first moment, 1 at ĥ = 0.
  CHECK(continuum_second_moment(a, 0.0, 0.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("exact second moments approach the continuum, finite-mean law") {
  const auto law = half_half();
  const auto disorder = DisorderLaw::gaussian();
  double prev = 1e9;
  for (std::size_t n : {100u, 400u, 1600u}) {
    const auto c = scale_couplings(law, 1.0, 0.0, n);
    const double m = second_moment_exact(law, disorder, n, c.beta, c.h, PinMode::conditioned);
    const double gap = std::abs(m / continuum_second_moment(law, 1.0, 0.0, 1.0) - 1.0);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("lognormal limit law") {
  const auto l = lognormal_limit_law(1.5, 1.0, 0.0, 1.0);
  CHECK(l.mean() == doctest::Approx(1.0));
  CHECK(l.volatility == doctest::Approx(2.0 / 3.0));
  CHECK(l.cdf(std::exp(l.drift)) == doctest::Approx(0.5));
  CHECK(l.cdf(-1.0) == 0.0);
  CHECK_THROWS_AS(lognormal_limit_law(0.5, 1.0, 0.0, 1.0), InputError);
}
