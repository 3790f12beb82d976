#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gradlim/graduation.hpp"
#include "gradlim/measures.hpp"
#include "gradlim/rng.hpp"
#include "gradlim/test_function.hpp"

using namespace gradlim;

TEST_CASE("theta convention") {
  CHECK(graduation::theta(0.0) == doctest::Approx(0.5));
  CHECK(graduation::theta(0.25) == doctest::Approx(0.25));
  CHECK(graduation::theta(0.5) == doctest::Approx(0.0));
  CHECK(graduation::theta(0.75) == doctest::Approx(-0.25));
  // floor convention for negatives: {-0.25} = 0.75
  CHECK(graduation::theta(-0.25) == doctest::Approx(-0.25));
  CHECK(graduation::theta(3.25) == doctest::Approx(graduation::theta(0.25)));
}

TEST_CASE("nearest-mode identity n(Y_n - Y) = theta(nY) to 1e-12") {
  Rng rng(7);
  for (int n : {1, 7, 64, 1000}) {
    for (int i = 0; i < 10000; ++i) {
      const double y = -4.0 + 8.0 * rng.uniform();
      const double se = graduation::scaled_error1(y, graduation::GradMode::nearest, n);
      CHECK(std::abs(se - graduation::theta(n * y)) <= 1e-12);
    }
  }
}

TEST_CASE("scaled error ranges per mode") {
  Rng rng(13);
  for (int i = 0; i < 5000; ++i) {
    const double y = -4.0 + 8.0 * rng.uniform();
    const int n = 1 + static_cast<int>(rng.uniform() * 100);
    const double se_near =
        graduation::scaled_error1(y, graduation::GradMode::nearest, n);
    CHECK(se_near > -0.5 - 1e-15);
    CHECK(se_near <= 0.5 + 1e-15);
    const double se_def =
        graduation::scaled_error1(y, graduation::GradMode::by_default, n);
    CHECK(se_def <= 0.0);
    CHECK(se_def > -1.0 - 1e-15);
    const double se_exc =
        graduation::scaled_error1(y, graduation::GradMode::by_excess, n);
    CHECK(se_exc >= 0.0);
    CHECK(se_exc <= 1.0 + 1e-15);
    // default and excess errors differ by one step except on the grid
    if (se_def != 0.0)
      CHECK(se_exc - se_def == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("graduate lands on the grid") {
  Rng rng(29);
  for (int i = 0; i < 2000; ++i) {
    const double y = -4.0 + 8.0 * rng.uniform();
    const int n = 1 + static_cast<int>(rng.uniform() * 50);
    for (auto mode : {graduation::GradMode::by_default,
                      graduation::GradMode::by_excess}) {
      const double g = graduation::graduate1(y, mode, n);
      const double t = g * n;
      CHECK(std::abs(t - std::round(t)) < 1e-9);
    }
    // nearest lands on the midpoint-shifted grid [nY]/n + 1/(2n)
    const double g = graduation::graduate1(y, graduation::GradMode::nearest, n);
    const double t = g * n - 0.5;
    CHECK(std::abs(t - std::round(t)) < 1e-9);
  }
}

TEST_CASE("alpha scaling attached to the scheme") {
  CHECK(graduation::nearest_scheme(8).alpha_bias() == doctest::Approx(64.0));
  CHECK(graduation::default_scheme(8).alpha_bias() == doctest::Approx(8.0));
  CHECK(graduation::excess_scheme(8).alpha_bias() == doctest::Approx(8.0));
  CHECK(graduation::dyadic_scheme(5).alpha_bias() ==
        doctest::Approx(std::pow(4.0, 5)));
  CHECK(graduation::default_scheme(8).alpha_quadratic() ==
        doctest::Approx(64.0));
}

TEST_CASE("bias operator estimator algebra is exact") {
  // a_tilde = (a_bar + a_under)/2 and a_slash = (a_bar - a_under)/2 hold at
  // the estimate level, not just in the limit
  const auto law = measures::normal_law();
  const auto rep = graduation::estimate_bias_operators(
      law, fns::sine(), fns::sine(), graduation::nearest_scheme(), {8, 16},
      20000, 99);
  for (const auto& e : rep.per_n) {
    CHECK(e.a_tilde.value ==
          doctest::Approx(0.5 * (e.a_bar.value + e.a_under.value))
              .epsilon(1e-12));
    CHECK(e.a_slash.value ==
          doctest::Approx(0.5 * (e.a_bar.value - e.a_under.value))
              .epsilon(1e-12));
  }
}

TEST_CASE("dyadic quadratic error matches a brute-force summation oracle") {
  // small-n oracle computed in-place: uniform signal discretized on a fine
  // grid, binary truncation error squared, scaled by 4^n
  const int n = 6;
  const double scale = std::pow(4.0, n);
  const double pow2n = std::pow(2.0, n);
  const auto phi = fns::sin_2pi();
  const long grid = 200000;
  double oracle = 0.0;
  for (long i = 0; i < grid; ++i) {
    const double y = (i + 0.5) / static_cast<double>(grid);
    const double frac = y * pow2n - std::floor(y * pow2n);
    const double yn = y - 0.5 * frac / pow2n;
    const double d = phi.value1(yn) - phi.value1(y);
    oracle += scale * d * d;
  }
  oracle /= static_cast<double>(grid);

  const auto law = measures::uniform_law();
  const auto rep = graduation::estimate_gamma(
      law, phi, graduation::dyadic_scheme(), {n}, 400000, 77);
  CHECK(std::abs(rep.points[0].estimate.value - oracle) <=
        4.0 * rep.points[0].estimate.stderr_);
  // and the oracle itself sits at (1/12) E[phi'^2]
  CHECK(oracle == doctest::Approx(rep.target).epsilon(2e-3));
}

TEST_CASE("gamma limit constants per scheme") {
  const auto law = measures::uniform_law();
  const auto id = fns::identity();
  const auto near = graduation::estimate_gamma(
      law, id, graduation::nearest_scheme(), {512}, 200000, 5);
  CHECK(near.limit_constant == doctest::Approx(1.0 / 12.0));
  CHECK(std::abs(near.points[0].estimate.value - 1.0 / 12.0) <=
        3.0 * near.points[0].estimate.stderr_);
  const auto def = graduation::estimate_gamma(
      law, id, graduation::default_scheme(), {512}, 200000, 6);
  CHECK(def.limit_constant == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(def.points[0].estimate.value - 1.0 / 3.0) <=
        3.0 * def.points[0].estimate.stderr_);
}

TEST_CASE("gamma consistency: direct vs algebraic combination") {
  const auto law = measures::normal_law();
  const auto rep = graduation::gamma_consistency_check(
      law, fns::sine(), fns::sine(),
      graduation::nearest_scheme(256), 200000, 41);
  CHECK(rep.discrepancy_sigmas <= 4.0);
}

TEST_CASE("uniformity holds for normal and fails for dirac") {
  const auto normal = measures::normal_law();
  const auto ok = graduation::uniformity_independence_test(
      normal, graduation::nearest_scheme(), {1024}, 50000, 31);
  CHECK(ok.rows[0].ks_per_component[0].pass);

  const auto dirac = measures::dirac_law(0.3);
  const auto bad = graduation::uniformity_independence_test(
      dirac, graduation::nearest_scheme(), {1024}, 50000, 32);
  CHECK_FALSE(bad.rows[0].ks_per_component[0].pass);
}

TEST_CASE("pair-form uniformity tracks the Rajchman property of X") {
  const auto normal = measures::normal_law();
  const auto uni = measures::uniform_law();
  const auto ok = graduation::uniformity_pair_test(normal, uni, {512}, 50000,
                                                   61);
  CHECK(ok.rows[0].ks_per_component[0].pass);
}

TEST_CASE("change of measure rejects a sign-changing factor") {
  const auto law = measures::normal_law();
  CHECK_THROWS_AS(graduation::gamma_change_of_measure(
                      law, [](double y) { return std::sin(y); },
                      fns::identity(), graduation::nearest_scheme(64), 1000,
                      1),
                  std::invalid_argument);
}

TEST_CASE("law expectation: quadrature agrees with monte carlo") {
  const auto law = measures::normal_law();
  const auto g = [](double y) { return std::cos(y) * std::cos(y); };
  const double quad = graduation::law_expectation(law, g, 100000, 3);
  // E[cos^2 Y] = (1 + e^{-2})/2
  CHECK(quad == doctest::Approx(0.5 * (1.0 + std::exp(-2.0))).epsilon(1e-9));
}
