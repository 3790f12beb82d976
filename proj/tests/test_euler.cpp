#include <doctest.h>

#include <cmath>

#include "gradlim/euler.hpp"

using namespace gradlim;

TEST_CASE("driver identities") {
  Rng rng(19);
  euler::ErrorLimitDrivers d;
  d.b = paths::simulate_brownian(1.0, 256, rng);
  d.w = paths::simulate_brownian(1.0, 256, rng);
  double z12 = 0.0, z21 = 0.0;
  for (std::int64_t i = 0; i < 256; ++i) {
    z12 += d.dz12(i);
    z21 += d.dz21(i);
    CHECK(std::abs(z12 + z21 - d.b.values[i + 1]) <= 1e-12);
  }
  CHECK(d.dz22() == doctest::Approx(0.5 / 256.0));
}

TEST_CASE("constant system: scheme exact and limit identically zero") {
  const auto sde = euler::constant_sde(2.0, {1.0, -1.0});
  Rng rng(23);
  const auto b = paths::simulate_brownian(1.0, 128, rng);
  const auto sol = euler::euler_solve(sde, b);
  // X1 = x0 + 2 B_t on the grid, X2 frozen
  for (std::int64_t i = 0; i <= 128; ++i) {
    CHECK(sol.x1[i] == doctest::Approx(1.0 + 2.0 * b.values[i]).epsilon(1e-12));
    CHECK(sol.x2[i] == -1.0);
  }
  euler::ErrorLimitDrivers d;
  d.b = b;
  d.w = paths::simulate_brownian(1.0, 128, rng);
  const auto u = euler::simulate_error_limit(sde, sol, d);
  CHECK(u.x1.abs().maxCoeff() == 0.0);
  CHECK(u.x2.abs().maxCoeff() == 0.0);
}

TEST_CASE("euler solve is deterministic in the driving path") {
  const auto sde = euler::sine_mechanical_sde();
  const auto b = paths::simulate_brownian(1.0, 512, std::uint64_t{41});
  const auto s1 = euler::euler_solve(sde, b);
  const auto s2 = euler::euler_solve(sde, b);
  CHECK((s1.x1 - s2.x1).abs().maxCoeff() == 0.0);
  CHECK((s1.x2 - s2.x2).abs().maxCoeff() == 0.0);
}

TEST_CASE("reference solve restricts the fine grid") {
  const auto sde = euler::linear_sde();
  const auto fine = paths::simulate_brownian(1.0, 64 * 64, std::uint64_t{43});
  const auto ref = euler::reference_solve(sde, fine, 64);
  CHECK(ref.steps() == 64);
  const auto full = euler::euler_solve(sde, fine);
  CHECK(ref.x1[32] == full.x1[32 * 64]);
  CHECK_THROWS_AS(euler::reference_solve(sde, fine, 128),
                  std::invalid_argument);
}

TEST_CASE("linear system error scales like 1/n") {
  // strong error of the scheme against a much finer solve shrinks linearly,
  // so the n-scaled error stays bounded
  const auto sde = euler::linear_sde();
  double scaled[2] = {0.0, 0.0};
  int idx = 0;
  for (int n : {32, 64}) {
    double acc = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
      Rng rng = Rng::derive(777, static_cast<std::uint64_t>(r));
      const auto fine = paths::simulate_brownian(1.0, n * 64, rng);
      paths::SamplePath coarse;
      coarse.horizon = 1.0;
      coarse.values.resize(n + 1);
      for (int k = 0; k <= n; ++k) coarse.values[k] = fine.values[k * 64];
      const auto sc = euler::euler_solve(sde, coarse);
      const auto sf = euler::euler_solve(sde, fine);
      acc += std::abs(n * (sc.x1[n] - sf.x1[n * 64]));
    }
    scaled[idx++] = acc / reps;
  }
  CHECK(scaled[1] < 2.0 * scaled[0]);
  CHECK(scaled[1] > 0.0);
}

TEST_CASE("distribution compare runs and reports both sides") {
  const auto sde = euler::sine_mechanical_sde();
  const auto rep = euler::error_distribution_compare(sde, {32}, 512, 7, 64);
  REQUIRE(rep.rows.size() == 1);
  const auto& row = rep.rows[0];
  CHECK(row.n == 32);
  CHECK(row.lhs.mean.size() == 2);
  CHECK(row.rhs.mean.size() == 2);
  CHECK(row.ks_two_sample.size() == 2);
  // the error is genuinely random at this resolution
  CHECK(row.lhs.variance[0].value > 0.0);
  CHECK(row.rhs.variance[0].value > 0.0);
}
