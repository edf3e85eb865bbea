#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "chaoslim/errors.hpp"
#include "chaoslim/tilting.hpp"

using namespace chaoslim;

namespace {

DiscreteLaw two_point(double p) { return DiscreteLaw({{1.0, p}, {-1.0, 1.0 - p}}); }

}  // namespace

TEST_CASE("window size") {
  CHECK(choose_A(DiscreteLaw({{-3, 0.25}, {-1, 0.25}, {1, 0.25}, {3, 0.25}})) == 3.0);
  CHECK(choose_A(two_point(0.5)) == 1.0);
  // Rare far atom stays outside.
  CHECK(choose_A(DiscreteLaw({{-5, 0.001}, {-1, 0.4995}, {1, 0.4995}})) == 1.0);
  CHECK_THROWS_AS(choose_A(DiscreteLaw({{0.0, 1.0}})), InputError);
  CHECK(choose_A(DiscreteLaw({{-1, 0.5}, {2, 0.5}}), TiltInterval::one_sided) == 2.0);
}

TEST_CASE("two-point law with small mean") {
  const auto law = two_point(0.501);
  const auto r = tilt_zero_mean(law);
  CHECK(r.A == 1.0);
  CHECK(r.epsilon == doctest::Approx(1.0 / 144.0));
  CHECK(r.lambda == doctest::Approx(0.5 * std::log(0.499 / 0.501)).epsilon(1e-10));
  CHECK(std::abs(r.tilted_mean()) < 1e-12);
  CHECK(r.normalization() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.tilted_second_moment() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.f(5.0) == 1.0);

  const auto rep = verify_tilt_bounds(r, law, {-1.0, 0.5, 2.0, 4.0});
  CHECK(rep.all_hold());
  CHECK(rep.C == doctest::Approx(12.0));
  CHECK_FALSE(rep.sign_condition);
  CHECK(rep.lambda_bound.lhs <= 1.0 / 27.0);
  CHECK(rep.density_power.size() == 4);
}

TEST_CASE("mean too large for the window") {
  CHECK_THROWS_AS(tilt_zero_mean(two_point(0.55)), PreconditionError);
}

TEST_CASE("atoms outside the window keep weight one") {
  const DiscreteLaw law({{-5, 0.001}, {-1, 0.4995}, {1, 0.4995}});
  const auto r = tilt_zero_mean(law);
  CHECK(r.A == 1.0);
  CHECK(r.density[0] == 1.0);
  CHECK(r.density[1] < 1.0);
  CHECK(r.density[2] > 1.0);
  CHECK(std::abs(r.tilted_mean()) < 1e-12);
  CHECK(r.normalization() == doctest::Approx(1.0).epsilon(1e-12));
  const auto rep = verify_tilt_bounds(r, law, {2.0});
  CHECK(rep.all_hold());
}

TEST_CASE("one-sided window") {
  const DiscreteLaw law({{-2, 0.25}, {-1, 0.25}, {1, 0.25001}, {2, 0.24999}});
  CHECK(law.mean() < 0.0);
  const auto r = tilt_zero_mean(law, TiltInterval::one_sided);
  CHECK(r.reflected);
  CHECK(r.lo == -2.0);
  CHECK(r.hi == 0.0);
  CHECK(r.f(1.0) == 1.0);
  CHECK(r.f(2.0) == 1.0);
  CHECK(std::abs(r.tilted_mean()) < 1e-12);
  CHECK(r.normalization() == doctest::Approx(1.0).epsilon(1e-12));
  const auto rep = verify_tilt_bounds(r, law, {2.0});
  CHECK(rep.sign_condition);
  CHECK(std::isfinite(rep.C_prime));
  CHECK(rep.improved_bound.holds);
  CHECK_THROWS_AS(tilt_zero_mean(DiscreteLaw({{-2, 0.25}, {-1, 0.25}, {1, 0.26}, {2, 0.24}}),
                                 TiltInterval::one_sided),
                  PreconditionError);
}

TEST_CASE("tilted family") {
  const double s = std::sqrt(0.99);
  const VariableFamily ok({{1, two_point(0.501)}, {2, two_point(0.499)}});
  const auto ft = tilt_family(ok, {2.0});
  CHECK(ft.results.size() == 2);
  CHECK(ft.C_max == doctest::Approx(12.0));
  CHECK(ft.C_p_max.at(2.0) == doctest::Approx(tilt_constant_p(2.0, 1.0, 1.0 / 144.0)));
  CHECK_FALSE(ft.C_prime_max.has_value());

  const VariableFamily bad({{1, two_point(0.55)}, {2, DiscreteLaw({{-s, 0.5}, {s, 0.5}})},
                            {3, two_point(0.45)}});
  try {
    tilt_family(bad, {2.0});
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("1,3") != std::string::npos);
  }
}

TEST_CASE("density power constant") {
  CHECK(tilt_constant_p(0.0, 1.0, 0.5) == doctest::Approx(8.0));
  CHECK(tilt_constant_p(-2.0, 2.0, 0.5) == tilt_constant_p(2.0, 2.0, 0.5));
}
