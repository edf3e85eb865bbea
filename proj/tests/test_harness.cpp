#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "chaoslim/errors.hpp"
#include "chaoslim/harness.hpp"
#include "chaoslim/rng.hpp"
#include "chaoslim/stats.hpp"

using namespace chaoslim;

namespace {

struct ThreadEnv {
  explicit ThreadEnv(const char* v) { setenv("CHAOSLIM_THREADS", v, 1); }
  ~ThreadEnv() { unsetenv("CHAOSLIM_THREADS"); }
};

}  // namespace

TEST_CASE("moment summary") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(x);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.se_mean == doctest::Approx(std::sqrt(5.0 / 12.0)));
  // m₂ = 5/4, m₄ = 41/16.
  CHECK(s.se_variance == doctest::Approx(std::sqrt((41.0 / 16.0 - 25.0 / 16.0) / 4.0)));
  CHECK_THROWS_AS(summarize(std::vector<double>{1.0}), InputError);
}

TEST_CASE("KS statistics") {
  std::vector<double> u(200);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (i + 0.5) / 200.0;
  CHECK(ks_statistic(u, [](double x) { return x; }) == doctest::Approx(0.5 / 200.0));
  CHECK(ks_statistic(u, [](double x) { return x * x; }) == doctest::Approx(0.25).epsilon(0.02));
  CHECK_THROWS_AS(ks_statistic(std::vector<double>(50, 0.1), [](double x) { return x; }),
                  InputError);
  CHECK(ks_two_sample(u, u) == 0.0);
  std::vector<double> shifted(u);
  for (auto& v : shifted) v += 0.0975;
  CHECK(ks_two_sample(u, shifted) == doctest::Approx(0.1));
  // Doubling weights changes nothing; zeroing half of them does.
  CHECK(ks_two_sample_weighted(u, std::vector<double>(200, 2.0), u) == 0.0);
  std::vector<double> w(200, 1.0);
  for (std::size_t i = 100; i < 200; ++i) w[i] = 0.0;
  CHECK(ks_two_sample_weighted(u, w, u) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_two_sample_weighted(u, std::vector<double>(3, 1.0), u), InputError);
  CHECK(ks_point_mass(std::vector<double>(10, 2.0), 2.0) == 0.0);
  CHECK(ks_point_mass(std::vector<double>{1.0, 2.0, 2.0, 3.0}, 2.0) == doctest::Approx(0.25));
}

TEST_CASE("critical values and effective sample size") {
  CHECK(ks_critical_coefficient(0.05) == doctest::Approx(1.3581).epsilon(1e-4));
  CHECK(normal_two_sided_quantile(0.95) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK_THROWS_AS(ks_critical_coefficient(1.5), InputError);
  CHECK(effective_sample_size(std::vector<double>(10, 3.0)) == doctest::Approx(10.0));
  CHECK(effective_sample_size(std::vector<double>{1.0, 0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("trend check") {
  const std::vector<double> se{0.1, 0.1, 0.1, 0.1};
  CHECK(nonincreasing_trend(std::vector<double>{4, 3, 2, 1}, se).holds);
  auto t = nonincreasing_trend(std::vector<double>{4, 3, 3.1, 1}, se);
  CHECK(t.holds);
  CHECK(t.inversions == 1);
  CHECK_FALSE(nonincreasing_trend(std::vector<double>{4, 3, 3.5, 1}, se).holds);
  CHECK_FALSE(nonincreasing_trend(std::vector<double>{4, 4.05, 3, 3.05}, se).holds);
}

TEST_CASE("worker pool") {
  {
    ThreadEnv env("3");
    CHECK(worker_count() == 3);
    const auto v = parallel_map(1000, [](std::size_t i) { return static_cast<double>(i * i); });
    CHECK(v[999] == 998001.0);
    CHECK_THROWS_AS(parallel_map(100,
                                 [](std::size_t i) -> double {
                                   if (i == 57) throw NumericError("boom");
                                   return 0.0;
                                 }),
                    NumericError);
  }
  ThreadEnv env("0");
  CHECK(worker_count() >= 1);
}

TEST_CASE("samples do not depend on the thread count") {
  const auto law = RenewalLaw::from_jumps({0.5, 0.5});
  const auto dis = DisorderLaw::gaussian();
  std::vector<PinningSample> a;
  std::vector<PinningSample> b;
  {
    ThreadEnv env("1");
    a = sample_pinning(law, dis, 50, 1.0, 0.0, PinMode::conditioned, 64, 11);
  }
  {
    ThreadEnv env("4");
    b = sample_pinning(law, dis, 50, 1.0, 0.0, PinMode::conditioned, 64, 11);
  }
  for (std::size_t s = 0; s < a.size(); ++s) {
    CHECK(a[s].z == b[s].z);
    CHECK(a[s].seed == derive_seed(11, s));
  }
  const auto walk = WalkLaw::simple();
  const auto p1 = sample_polymer(walk, dis, 8, 0.5, PolymerMode::free, std::nullopt, 8, 2);
  const auto p2 = sample_polymer(walk, dis, 8, 0.5, PolymerMode::free, std::nullopt, 8, 2);
  CHECK(p1[5].z == p2[5].z);
  CHECK(p1[5].z != p1[6].z);
}

TEST_CASE("config validation") {
  const auto ok = ExperimentConfig::from_json(Json::parse(R"({
    "model": "polymer", "grid": [2, 4], "samples": 10, "seed": 3,
    "params": {"beta_hat": 0.5}, "output": {"csv": "a.csv"}})"));
  CHECK(ok.model == "polymer");
  CHECK(ok.grid.size() == 2);
  CHECK(ok.seed == 3);
  CHECK(ok.csv_path == "a.csv");
  CHECK(ok.json_path.empty());
  CHECK_THROWS_AS(ExperimentConfig::from_json(Json::parse(R"({"model": "x", "grid": [1]})")),
                  InputError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(Json::parse(R"({"model": "polymer", "grid": [4, 2]})")),
                  InputError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(Json::parse(R"({"model": "polymer", "grid": []})")),
                  InputError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(
                      Json::parse(R"({"model": "pinning", "grid": [10], "samples": 50})")),
                  InputError);
  CHECK_NOTHROW(ExperimentConfig::from_json(Json::parse(R"({"model": "tilt"})")));
  CHECK_THROWS_AS(pin_mode_from_name("both"), InputError);
  CHECK(polymer_mode_from_name("point2point") == PolymerMode::point2point);
  CHECK_THROWS_AS(walk_from_params(Json{{"walk", "levy"}}), InputError);
}

TEST_CASE("polymer study and report emission") {
  ExperimentConfig cfg;
  cfg.model = "polymer";
  cfg.grid = {2, 4, 8};
  cfg.params = {{"beta_hat", 0.5}, {"gap_tolerance", 1.0}};
  const auto rep = run_convergence_study(cfg);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].provenance == "DP-exact");
  CHECK(rep.all_passed());
  const auto j = rep.to_json();
  CHECK(j["model"] == "polymer");
  CHECK(j["rows"].size() == 3);
  CHECK(j["passed"] == true);
  CHECK(j["verdicts"][0].contains("calibration"));
  std::ostringstream csv;
  rep.write_csv(csv);
  CHECK(csv.str().rfind("grid,provenance,gap,second_moment_continuum,second_moment_exact\n", 0) == 0);

  cfg.grid = {2.5};
  try {
    run_convergence_study(cfg);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("grid point") != std::string::npos);
  }
}

TEST_CASE("non-finite values become null or empty") {
  ComparisonReport rep{"m", {{1.0, "DP-exact", {{"a", std::numeric_limits<double>::quiet_NaN()}}}}, {}};
  CHECK(rep.to_json()["rows"][0]["a"].is_null());
  std::ostringstream csv;
  rep.write_csv(csv);
  CHECK(csv.str() == "grid,provenance,a\n1,DP-exact,\n");
}

TEST_CASE("tilt study") {
  const auto cfg = ExperimentConfig::from_json(Json::parse(R"({
    "model": "tilt", "params": {"atoms": [[1, 0.501], [-1, 0.499]]}})"));
  const auto rep = run_convergence_study(cfg);
  CHECK(rep.all_passed());
  CHECK(rep.rows[0].values.at("lambda") == doctest::Approx(0.5 * std::log(0.499 / 0.501)));
}

TEST_CASE("ising study means") {
  ExperimentConfig cfg;
  cfg.model = "ising";
  cfg.grid = {1, 2};
  cfg.samples = 4000;
  cfg.params = {{"lambda_hat", 1.0}, {"h_hat", 0.5}};
  const auto rep = run_convergence_study(cfg);
  CHECK(rep.all_passed());
}

TEST_CASE("pinning study rows") {
  ExperimentConfig cfg;
  cfg.model = "pinning";
  cfg.grid = {10, 20};
  cfg.samples = 200;
  const auto rep = run_convergence_study(cfg);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].values.count("ks") == 1);
  CHECK(rep.rows[1].values.at("ks_se") == doctest::Approx(0.2603 / std::sqrt(200.0)));
  CHECK(rep.rows[1].values.at("mean") ==
        doctest::Approx(1.0).epsilon(4.0 * rep.rows[1].values.at("mean_se")));
}

TEST_CASE("Lindeberg audit") {
  const auto k = degree_one_kernel(4);
  CHECK(k.entries().size() == 4);
  CHECK_THROWS_AS(degree_one_kernel(0), InputError);
  const auto r16 = lindeberg_audit(degree_one_kernel(16), "rademacher", "gaussian", 20000, 1);
  const auto r256 = lindeberg_audit(degree_one_kernel(256), "rademacher", "gaussian", 20000, 1);
  CHECK(r16.passed);
  CHECK(r256.passed);
  CHECK(r256.bound < r16.bound);
  // E cos of a Rademacher sum is cos(1/√n)^n.
  const double exact = std::abs(std::pow(std::cos(0.25), 16.0) - std::exp(-0.5));
  CHECK(std::abs(r16.distance - exact) < 4.0 * r16.std_error);
  CHECK_THROWS_AS(lindeberg_audit(k, "rademacher", "cauchy", 1000, 1), InputError);
  CHECK_THROWS_AS(lindeberg_audit(k, "rademacher", "gaussian", 10, 1), InputError);
}
