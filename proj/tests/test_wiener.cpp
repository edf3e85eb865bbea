#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "chaoslim/errors.hpp"
#include "chaoslim/rng.hpp"
#include "chaoslim/stats.hpp"
#include "chaoslim/wiener.hpp"

using namespace chaoslim;

namespace {

GriddedKernel random_symmetric2(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double x = rng.normal();
      v[i * n + j] = x;
      v[j * n + i] = x;
    }
  }
  return GriddedKernel(2, n, v);
}

}  // namespace

TEST_CASE("tessellation geometry") {
  const auto t = Tessellation::unit_cube(2, 4);
  CHECK(t.size() == 16);
  CHECK(t.cell_volume() == doctest::Approx(1.0 / 16.0));
  CHECK(t.box_volume() == doctest::Approx(1.0));
  CHECK(t.center(0) == Point{0.125, 0.125});
  CHECK(t.center(1) == Point{0.125, 0.375});
  CHECK(t.center(4) == Point{0.375, 0.125});
  const auto r = t.refined();
  CHECK(r.size() == 64);
  CHECK(r.cell_volume() == doctest::Approx(1.0 / 64.0));
  const Tessellation box({0.0, -1.0}, {2.0, 1.0}, {2, 4});
  CHECK(box.box_volume() == doctest::Approx(4.0));
  CHECK_THROWS_AS(Tessellation({0.0}, {1.0, 2.0}, {1}), InputError);
  CHECK_THROWS_AS(Tessellation({0.0}, {0.0}, {1}), InputError);
}

TEST_CASE("grid white noise") {
  const auto t = Tessellation::unit_cube(1, 1000);
  const GridWhiteNoise a(t, 4);
  const GridWhiteNoise b(t, 4);
  CHECK(a[17] == b[17]);
  double ss = 0.0;
  for (double w : a.values()) ss += w * w;
  // Σ W(C)² ≈ Leb(box) with relative SD √(2/n).
  CHECK(ss == doctest::Approx(1.0).epsilon(0.2));
  double half = 0.0;
  for (std::size_t c = 0; c < 500; ++c) half += a[c];
  CHECK(a.box({0.0}, {0.5}) == doctest::Approx(half));
  CHECK(a.integrate([](const Point&) { return 2.0; }) ==
        doctest::Approx(2.0 * a.box({0.0}, {1.0})));
  std::ostringstream out;
  write_noise_csv(out, GridWhiteNoise(Tessellation::unit_cube(2, 2), 1));
  const auto s = out.str();
  CHECK(s.rfind("cell_index,x_center_1,x_center_2,value\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}

TEST_CASE("multiple integrals sum over distinct tuples") {
  const std::size_t n = 6;
  const auto t = Tessellation::unit_cube(1, n);
  const GridWhiteNoise w(t, 9);
  const auto f = random_symmetric2(n, 3);
  double ref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t tup[2] = {i, j};
      ref += f.at(tup) * w[i] * w[j];
    }
  }
  CHECK(multiple_integral(f, w) == doctest::Approx(ref));

  // Degree three against a triple loop.
  const auto f3 = GriddedKernel::from_function(t, 3, [](std::span<const Point> p) {
    return p[0][0] * p[1][0] * p[2][0] + 1.0;
  });
  double ref3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        const std::size_t tup[3] = {i, j, k};
        ref3 += f3.at(tup) * w[i] * w[j] * w[k];
      }
    }
  }
  CHECK(multiple_integral(f3, w) == doctest::Approx(ref3));

  std::vector<double> bad(n * n, 0.0);
  bad[1] = 1.0;
  CHECK_THROWS_AS(multiple_integral(GriddedKernel(2, n, bad), w), InputError);
  CHECK_THROWS_AS(GriddedKernel(2, n, std::vector<double>(5)), InputError);
  CHECK_THROWS_AS(GriddedKernel(5, 64, std::vector<double>{}), ResourceError);
  CHECK_THROWS_AS(multiple_integral(f, GridWhiteNoise(Tessellation::unit_cube(1, 5), 1)),
                  InputError);
}

TEST_CASE("elementary symmetric polynomials") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto e = elementary_symmetric(x, 4);
  CHECK(e[0] == 1.0);
  CHECK(e[1] == doctest::Approx(10.0));
  CHECK(e[2] == doctest::Approx(35.0));
  CHECK(e[3] == doctest::Approx(50.0));
  CHECK(e[4] == doctest::Approx(24.0));
  const auto e2 = elementary_symmetric(x, 2);
  CHECK(e2.size() == 3);
  CHECK(e2[2] == doctest::Approx(35.0));
}

TEST_CASE("Ito isometry and orthogonality on a grid") {
  const std::size_t n = 8;
  const auto t = Tessellation::unit_cube(1, n);
  const auto f2 = random_symmetric2(n, 21);
  const auto f1 = GriddedKernel::from_function(t, 1, [](std::span<const Point> p) {
    return std::sin(3.0 * p[0][0]);
  });
  const std::size_t m = 40000;
  std::vector<double> i2(m);
  double cross = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const GridWhiteNoise w(t, derive_seed(77, s));
    i2[s] = multiple_integral(f2, w);
    cross += i2[s] * multiple_integral(f1, w);
  }
  const auto sum = summarize(i2);
  const double target = 2.0 * f2.norm_sq(t.cell_volume());
  CHECK(std::abs(sum.mean) < 4.0 * sum.se_mean);
  CHECK(std::abs(sum.variance - target) < 4.0 * sum.se_variance);
  CHECK(std::abs(cross / static_cast<double>(m)) < 4.0 * std::sqrt(target * f1.norm_sq(t.cell_volume()) / m));
}

TEST_CASE("product-kernel series equals the finite product") {
  const auto t = Tessellation::unit_cube(1, 10);
  const GridWhiteNoise w(t, 5);
  const double rho = 0.7;
  const double lh = 1.3;
  const double hh = 0.4;
  auto spec = factorized_spec(t, rho, lh, hh, 10);
  double prod = 1.0;
  for (std::size_t c = 0; c < t.size(); ++c) prod *= 1.0 + rho * (lh * w[c] + hh * t.cell_volume());
  CHECK(chaos_series_eval(spec, w).value == doctest::Approx(prod));

  // Dense kernels f_k = ρ^k through the generic path.
  ChaosSeriesSpec dense;
  dense.sigma0 = lh;
  dense.bias = spec.bias;
  dense.k_max = 3;
  for (std::size_t k = 0; k <= 3; ++k) {
    dense.kernels.push_back(k == 0 ? GriddedKernel(1.0)
                                   : GriddedKernel::from_function(t, k, [&](std::span<const Point>) {
                                       return std::pow(rho, static_cast<double>(k));
                                     }));
  }
  spec.k_max = 3;
  CHECK(chaos_series_eval(dense, w).value == doctest::Approx(chaos_series_eval(spec, w).value));
}

TEST_CASE("tail bound and summability") {
  const auto t = Tessellation::unit_cube(1, 4);
  const auto spec = factorized_spec(t, 1.0, 1.0, 0.0, 3);
  double tail = 0.0;
  double fact = 24.0;
  for (int k = 4; k < 40; ++k) {
    tail += 1.0 / fact;
    fact *= k + 1;
  }
  CHECK(chaos_series_eval(spec, GridWhiteNoise(t, 1)).tail_bound == doctest::Approx(tail));
  ChaosSeriesSpec bad = spec;
  bad.norm_sq = [](std::size_t k) { return std::tgamma(static_cast<double>(k) + 1.0) * std::pow(2.0, static_cast<double>(k)); };
  CHECK_THROWS_AS(check_l2_condition(bad), PreconditionError);
  CHECK_THROWS_AS(chaos_series_eval(bad, GridWhiteNoise(t, 1)), PreconditionError);
  // σ̄₀²‖f_k‖²/k! = 1/k! (1)^k is summable with or without the (1+ε) margin.
  CHECK_NOTHROW(check_l2_condition(spec));
}

TEST_CASE("factorized moments") {
  CHECK(factorized_moment(1.0, 0.0, 0.3, 2.0, 1.0) == doctest::Approx(std::exp(0.6)));
  // Against E Z^ζ of the lognormal law.
  for (double zeta : {0.5, 2.0, 3.0}) {
    const auto law = factorized_law(0.8, 1.1, -0.2, 1.5);
    const double m = std::exp(zeta * law.drift + 0.5 * zeta * zeta * law.volatility * law.volatility);
    CHECK(factorized_moment(0.8, 1.1, -0.2, zeta, 1.5) == doctest::Approx(m));
  }
  CHECK_THROWS_AS(factorized_moment(1.0, 1.0, 0.0, 2.0, 0.0), InputError);
}

TEST_CASE("grid second moment of the product series") {
  const auto t = Tessellation::unit_cube(2, 3);
  const double rho = 0.9;
  const auto spec = factorized_spec(t, rho, 0.8, 0.5, 9);
  const double v = t.cell_volume();
  const double one = std::pow(1.0 + rho * 0.5 * v, 2.0) + rho * rho * 0.64 * v;
  CHECK(product_grid_second_moment(t, rho, spec) == doctest::Approx(std::pow(one, 9.0)));
  CHECK(product_continuum_second_moment(t, rho, spec) ==
        doctest::Approx(std::exp(2.0 * rho * 0.5 + rho * rho * 0.64)));
  // Refinement closes the gap.
  const auto fine = Tessellation::unit_cube(2, 24);
  const auto sf = factorized_spec(fine, rho, 0.8, 0.5, 9);
  const double gap_coarse = std::abs(product_grid_second_moment(t, rho, spec) /
                                         product_continuum_second_moment(t, rho, spec) - 1.0);
  const double gap_fine = std::abs(product_grid_second_moment(fine, rho, sf) /
                                       product_continuum_second_moment(fine, rho, sf) - 1.0);
  CHECK(gap_fine < gap_coarse);
}

TEST_CASE("Cameron-Martin weight") {
  const auto t = Tessellation::unit_cube(1, 16);
  const GridWhiteNoise w(t, 3);
  double s = 0.0;
  for (double x : w.values()) s += x;
  CHECK(cameron_martin_weight(w, [](const Point&) { return 0.5; }) ==
        doctest::Approx(std::exp(0.5 * s - 0.125)));
  // E[weight] = 1 and E[weight · W(box)] = ν·Leb(box).
  double m0 = 0.0;
  double m1 = 0.0;
  const std::size_t n = 20000;
  for (std::size_t k = 0; k < n; ++k) {
    const GridWhiteNoise z(t, derive_seed(8, k));
    const double wt = cameron_martin_weight(z, [](const Point&) { return 0.5; });
    m0 += wt;
    m1 += wt * z.box({0.0}, {1.0});
  }
  CHECK(m0 / n == doctest::Approx(1.0).epsilon(0.03));
  CHECK(m1 / n == doctest::Approx(0.5).epsilon(0.1));
}
