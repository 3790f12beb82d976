#include <doctest.h>

#include <cmath>

#include "gradlim/paths.hpp"

using namespace gradlim;

TEST_CASE("theta periodic function moments") {
  const auto f = paths::theta_fn();
  CHECK(f.mean == 0.0);
  CHECK(f.l2sq == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(f(0.25) == doctest::Approx(0.25));
  CHECK(f(1.25) == doctest::Approx(0.25));  // 1-periodic
  CHECK(f(-0.75) == doctest::Approx(0.25));
}

TEST_CASE("brownian simulation basics") {
  const auto path = paths::simulate_brownian(2.0, 500, std::uint64_t{11});
  CHECK(path.values[0] == 0.0);
  CHECK(path.steps() == 500);
  CHECK(path.step() == doctest::Approx(0.004));
  const auto again = paths::simulate_brownian(2.0, 500, std::uint64_t{11});
  CHECK((path.values - again.values).abs().maxCoeff() == 0.0);
}

TEST_CASE("path csv export") {
  paths::SamplePath p;
  p.horizon = 1.0;
  p.values.resize(3);
  p.values << 0.0, 0.5, -0.25;
  const auto csv = paths::to_csv(p);
  CHECK(csv == "t,value\n0,0\n0.5,0.5\n1,-0.25\n");
}

TEST_CASE("oscillatory integral is linear in the integrand") {
  Rng rng(3);
  const auto path = paths::simulate_brownian(1.0, 4096, rng);
  paths::OscillatorySpec spec_theta{paths::theta_fn(), 16, 64};
  paths::OscillatorySpec spec_const{paths::constant_fn(0.7), 16, 64};
  paths::OscillatorySpec spec_sum{paths::shifted(paths::theta_fn(), 0.7), 16,
                                  64};
  const auto a = paths::oscillatory_integral(path, spec_theta);
  const auto b = paths::oscillatory_integral(path, spec_const);
  const auto c = paths::oscillatory_integral(path, spec_sum);
  CHECK((a.values + b.values - c.values).abs().maxCoeff() < 1e-10);
}

TEST_CASE("oscillatory integral rejects a coarse grid") {
  Rng rng(3);
  const auto path = paths::simulate_brownian(1.0, 100, rng);
  paths::OscillatorySpec spec{paths::theta_fn(), 16, 64};
  CHECK_THROWS_AS(paths::oscillatory_integral(path, spec),
                  std::invalid_argument);
}

TEST_CASE("constant integrand reproduces a scaled copy of the path") {
  Rng rng(5);
  const auto path = paths::simulate_brownian(1.0, 2048, rng);
  paths::OscillatorySpec spec{paths::constant_fn(2.0), 4, 64};
  const auto out = paths::oscillatory_integral(path, spec);
  CHECK((out.values - 2.0 * path.values).abs().maxCoeff() < 1e-12);
}

TEST_CASE("wiener isometry of the oscillatory integral") {
  // Var(int theta(ns) dB) over replications approximates int theta^2 = 1/12
  const int steps = 16 * 64;
  double sum = 0.0, sum_sq = 0.0;
  const int reps = 4000;
  paths::OscillatorySpec spec{paths::theta_fn(), 16, 64};
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::derive(1234, static_cast<std::uint64_t>(r));
    const auto path = paths::simulate_brownian(1.0, steps, rng);
    const auto z = paths::oscillatory_integral(path, spec);
    const double v = z.values[steps];
    sum += v;
    sum_sq += v * v;
  }
  const double var = sum_sq / reps - (sum / reps) * (sum / reps);
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.1));
}

TEST_CASE("euler error integrals telescope to the path") {
  Rng rng(17);
  const int n = 16;
  for (int K : {16, 64}) {
    const auto path = paths::simulate_brownian(1.0, n * K, rng);
    const auto ints = paths::euler_error_integrals(path, n);
    // at coarse grid times, I1 + I2 = B(1 - 1/(2K)) exactly
    const double shrink = 1.0 - 0.5 / static_cast<double>(K);
    for (int k = 1; k <= n; ++k) {
      const std::int64_t i = static_cast<std::int64_t>(k) * K;
      CHECK(std::abs(ints.i1.values[i] + ints.i2.values[i] -
                     shrink * path.values[i]) < 1e-10);
    }
  }
}

TEST_CASE("step function inner products") {
  paths::StepFunction one{{}, {1.0}};
  paths::StepFunction half{{0.5}, {1.0, 0.0}};
  CHECK(one.l2sq() == doctest::Approx(1.0));
  CHECK(half.l2sq() == doctest::Approx(0.5));
  CHECK(one.inner_product(half) == doctest::Approx(0.5));
  paths::StepFunction tri{{0.25, 0.75}, {1.0, -1.0, 2.0}};
  CHECK(tri.l2sq() == doctest::Approx(0.25 + 0.5 + 0.25 * 4.0));
}

TEST_CASE("rootzen rows carry the exact targets") {
  const auto rep = paths::verify_rootzen_limit(paths::theta_fn(), {32}, 1.0,
                                               2000, 7, 16, 0.01);
  CHECK(rep.rows.size() == 1);
  CHECK(rep.rows[0].variance_target == doctest::Approx(1.0 / 12.0));
  CHECK(rep.rows[0].covariance_target == 0.0);
}

TEST_CASE("time change rescales the rootzen targets") {
  const paths::TimeChange a = [](double t) { return 2.0 * t; };
  const auto rep = paths::verify_rootzen_limit(paths::theta_fn(), {32}, 1.0,
                                               4000, 7, 16, 0.01, a);
  CHECK(rep.rows[0].variance_target == doctest::Approx(2.0 / 12.0));
  CHECK(std::abs(rep.rows[0].terminal_variance.value -
                 rep.rows[0].variance_target) <=
        4.0 * rep.rows[0].terminal_variance.stderr_);
}

TEST_CASE("quadratic form symmetry in eta and zeta") {
  paths::StepFunction eta{{0.5}, {1.0, 0.5}};
  paths::StepFunction zeta{{0.25}, {0.0, 1.0}};
  const auto a = paths::quadratic_form_limit(eta, zeta, paths::theta_fn(),
                                             {32}, 2000, 7, 8);
  const auto b = paths::quadratic_form_limit(zeta, eta, paths::theta_fn(),
                                             {32}, 2000, 7, 8);
  CHECK(a.rows[0].target.real() == doctest::Approx(b.rows[0].target.real()));
  CHECK(a.dirichlet_form_constant.real() ==
        doctest::Approx(0.5 * a.rows[0].target.real()));
}
