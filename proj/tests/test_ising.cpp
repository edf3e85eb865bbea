#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "chaoslim/errors.hpp"
#include "chaoslim/ising.hpp"
#include "chaoslim/rng.hpp"

using namespace chaoslim;

namespace {

// Direct Gibbs sums on a w×h rectangle with + boundary spins. Spins are
// listed column by column, matching the library's site order.
struct Brute {
  int w;
  int h;
  std::vector<std::vector<int>> configs;
  std::vector<double> weights;

  Brute(int w_, int h_) : w(w_), h(h_) {
    const int n = w * h;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> s(n);
      for (int k = 0; k < n; ++k) s[k] = (mask >> k & 1) ? -1 : 1;
      auto spin = [&](int i, int j) {
        if (i < 1 || i > w || j < 1 || j > h) return 1;
        return s[(i - 1) * h + (j - 1)];
      };
      double e = 0.0;
      for (int j = 1; j <= h; ++j) {
        for (int i = 1; i <= w; ++i) {
          // Right and up bonds inside; all four bonds reach the boundary.
          if (i < w) e += spin(i, j) * spin(i + 1, j);
          if (j < h) e += spin(i, j) * spin(i, j + 1);
          if (i == 1) e += spin(i, j);
          if (i == w) e += spin(i, j);
          if (j == 1) e += spin(i, j);
          if (j == h) e += spin(i, j);
        }
      }
      configs.push_back(s);
      weights.push_back(std::exp(kBetaCritical * e));
    }
  }

  template <class F>
  double expect(F&& f) const {
    double z = 0.0;
    double s = 0.0;
    for (std::size_t c = 0; c < configs.size(); ++c) {
      z += weights[c];
      s += weights[c] * f(configs[c]);
    }
    return s / z;
  }
};

}  // namespace

TEST_CASE("critical constants") {
  CHECK(kBetaCritical == doctest::Approx(0.4406867935097715));
  CHECK(std::sinh(2.0 * kBetaCritical) == doctest::Approx(1.0));
  CHECK(kIsingCorrelationConstant > 1.0);
}

TEST_CASE("single site") {
  const auto sys = LatticeSpinSystem::rectangle(1, 1);
  const double m = std::tanh(4.0 * kBetaCritical);
  CHECK(m == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0));
  CHECK(sys.correlation({0}) == doctest::Approx(m).epsilon(1e-12));
  CHECK(sys.boundary().size() == 4);
  for (double xi : {-1.2, 0.0, 0.4}) {
    CHECK(rfim_partition(sys, {xi}) ==
          doctest::Approx(std::cosh(xi) + m * std::sinh(xi)).epsilon(1e-12));
  }
}

TEST_CASE("enumeration matches direct Gibbs sums") {
  for (auto [w, h] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{3, 3}}) {
    const auto sys = LatticeSpinSystem::rectangle(w, h);
    const Brute ref(w, h);
    const auto all = sys.all_correlations();
    const int n = w * h;
    for (int mask = 0; mask < (1 << n); mask += 3) {
      const double c = ref.expect([&](const std::vector<int>& s) {
        double p = 1.0;
        for (int k = 0; k < n; ++k) {
          if (mask >> k & 1) p *= s[k];
        }
        return p;
      });
      std::vector<std::size_t> idx;
      for (int k = 0; k < n; ++k) {
        if (mask >> k & 1) idx.push_back(static_cast<std::size_t>(k));
      }
      CHECK(sys.correlation(idx) == doctest::Approx(c).epsilon(1e-12));
      CHECK(all[static_cast<std::size_t>(mask)] == doctest::Approx(c).epsilon(1e-12));
    }
    CounterRng rng(w * 10 + h);
    std::vector<double> xi(n);
    for (auto& x : xi) x = rng.normal();
    const double z = ref.expect([&](const std::vector<int>& s) {
      double e = 0.0;
      for (int k = 0; k < n; ++k) e += xi[k] * s[k];
      return std::exp(e);
    });
    CHECK(rfim_partition(sys, xi) == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("chaos rewrite of the random-field partition function") {
  CounterRng rng(3);
  for (auto [w, h] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{2, 3}}) {
    const auto sys = LatticeSpinSystem::rectangle(w, h);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> xi(sys.size());
      for (auto& x : xi) x = 1.5 * rng.normal();
      const auto cr = chaos_rewrite(sys, xi);
      std::vector<double> t(xi.size());
      for (std::size_t i = 0; i < xi.size(); ++i) t[i] = std::tanh(xi[i]);
      CHECK(cr.prefactor * eval_multilinear(cr.kernel, t) ==
            doctest::Approx(rfim_partition(sys, xi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("GKS: nonnegative correlations, monotone in the domain") {
  const auto big = LatticeSpinSystem::rectangle(3, 3);
  for (double c : big.all_correlations()) CHECK(c >= -1e-14);
  const auto small = LatticeSpinSystem::from_sites({{1, 1}, {2, 1}, {1, 2}, {2, 2}});
  CHECK(small.correlation_at({{1, 1}}) >= big.correlation_at({{1, 1}}));
  CHECK(small.correlation_at({{1, 1}, {2, 2}}) >= big.correlation_at({{1, 1}, {2, 2}}));
}

TEST_CASE("decoupling check") {
  const auto sys = LatticeSpinSystem::rectangle(3, 3);
  const auto r = gks_decoupling_check(sys, {{{{1, 1}}, {1, 1}}, {{{3, 3}, {3, 2}}, {3, 3}}});
  CHECK(r.holds);
  CHECK(r.lhs == doctest::Approx(sys.correlation_at({{1, 1}, {3, 3}})));
  const auto one = LatticeSpinSystem::rectangle(1, 1);
  const auto two = LatticeSpinSystem::from_sites({{3, 3}, {3, 2}});
  CHECK(r.rhs == doctest::Approx(one.correlation({0}) * two.correlation_at({{3, 3}})));
  // (1,1) lies on the boundary of {(2,1)}.
  CHECK_THROWS_AS(gks_decoupling_check(sys, {{{{1, 1}}, {1, 1}}, {{{2, 1}}, {2, 1}}}), InputError);
  CHECK_THROWS_AS(gks_decoupling_check(sys, {{{{1, 1}}, {2, 2}}}), InputError);
  CHECK_THROWS_AS(gks_decoupling_check(sys, {{{{4, 1}}, {4, 1}}}), InputError);
}

TEST_CASE("enumeration cap") {
  const auto sys = LatticeSpinSystem::rectangle(5, 5);
  CHECK(sys.size() == 25);
  CHECK_THROWS_AS(sys.probabilities(), ResourceError);
  CHECK_THROWS_AS(sys.correlation({0}), ResourceError);
  CHECK_THROWS_AS(LatticeSpinSystem::from_sites({{1, 1}, {1, 1}}), InputError);
}

TEST_CASE("field scaling and normalization") {
  const double d = 0.25;
  const auto sys = LatticeSpinSystem::rectangle(3, 3, d);
  CHECK(sys.domain()->x1 == doctest::Approx(1.0));
  CHECK(sys.position(0).x == doctest::Approx(0.25));
  const auto prof = FieldProfiles::constant(2.0, 3.0);
  const auto f = scale_fields(prof, sys);
  CHECK(f.lambda[4] == doctest::Approx(2.0 * std::pow(d, 7.0 / 8.0)));
  CHECK(f.h[4] == doctest::Approx(3.0 * std::pow(d, 15.0 / 8.0)));
  const auto xi = field_xi(f, std::vector<double>(9, 1.0));
  CHECK(xi[0] == doctest::Approx(f.lambda[0] + f.h[0]));
  CHECK(normalization_prefactor(prof, *sys.domain(), d) ==
        doctest::Approx(std::exp(-0.5 * 4.0 * std::pow(d, -0.25))));
  // Non-constant profile: ∫ (x+y)² over the unit square is 7/6.
  const FieldProfiles lin{[](double x, double y) { return x + y; },
                          [](double, double) { return 0.0; }};
  const double fine = 1.0 / 200.0;
  CHECK(std::log(normalization_prefactor(lin, Rect{0, 0, 1, 1}, fine)) ==
        doctest::Approx(-0.5 * 7.0 / 6.0 * std::pow(fine, -0.25)).epsilon(1e-4));
}

TEST_CASE("f_omega") {
  const Rect unit{0.0, 0.0, 1.0, 1.0};
  CHECK(f_omega({{0.5, 0.5}}, unit) == doctest::Approx(std::pow(2.0, 0.125)));
  // Two points at distance 0.1, both 0.45 from the nearest side.
  CHECK(f_omega({{0.45, 0.5}, {0.55, 0.5}}, unit) == doctest::Approx(std::pow(0.1, -0.25)));
  CHECK_THROWS_AS(f_omega({{0.5, 0.5}, {0.5, 0.5}}, unit), DomainError);
  CHECK_THROWS_AS(f_omega({{1.5, 0.5}}, unit), InputError);
}

TEST_CASE("f_omega L2 ratio at n = 1") {
  // ∫_{[0,1]²} d(x, ∂Ω)^{−1/4} dx = (64/21)·2^{−3/4}.
  const auto r = f_omega_l2_ratio(Rect{0, 0, 1, 1}, 1, 200000, 5);
  CHECK(std::abs(r.value - 64.0 / 21.0 * std::pow(2.0, -0.75)) < 4.0 * r.std_error);
  CHECK_THROWS_AS(f_omega_l2_ratio(Rect{0, 0, 1, 1}, 0, 100, 5), InputError);
}

TEST_CASE("correlation bound constant") {
  const auto sys = LatticeSpinSystem::rectangle(3, 3, 0.25);
  const double c = correlation_bound_constant(sys, 3);
  CHECK(c > 0.0);
  CHECK(std::isfinite(c));
  CHECK(correlation_bound_constant(sys, 4) >= c);
  CHECK_THROWS_AS(correlation_bound_constant(LatticeSpinSystem::from_sites({{1, 1}}), 1),
                  InputError);
}
