#include <doctest.h>

#include <cmath>
#include <vector>

#include "gradlim/rng.hpp"
#include "gradlim/stats.hpp"

using namespace gradlim;

TEST_CASE("constant samples have zero error") {
  stats::Accumulator acc;
  acc.add(1.0);
  acc.add(1.0);
  acc.add(1.0);
  const auto est = stats::finalize(acc);
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(est.stderr_ == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("two-point sample mean and variance") {
  stats::Accumulator acc;
  acc.add(0.0);
  acc.add(2.0);
  const auto est = stats::finalize(acc);
  CHECK(est.value == doctest::Approx(1.0));
  // unbiased variance 2 -> stderr sqrt(2/2) = 1
  CHECK(est.stderr_ == doctest::Approx(1.0));
}

TEST_CASE("merge associativity to 1e-12") {
  Rng rng(11);
  stats::Accumulator whole, a, b, c;
  for (int i = 0; i < 3000; ++i) {
    const double x = rng.gaussian();
    whole.add(x);
    (i < 1000 ? a : i < 2000 ? b : c).add(x);
  }
  const auto merged = a.merged(b).merged(c);
  CHECK(merged.count == whole.count);
  CHECK(merged.sum == doctest::Approx(whole.sum).epsilon(1e-12));
  CHECK(merged.sum_sq == doctest::Approx(whole.sum_sq).epsilon(1e-12));
}

TEST_CASE("gaussian sample variance self-test") {
  Rng rng(7);
  const std::uint64_t n = 100000;
  Eigen::MatrixXd samples(n, 1);
  for (std::uint64_t i = 0; i < n; ++i)
    samples(static_cast<Eigen::Index>(i), 0) = rng.gaussian();
  const auto m = stats::mc_moments(samples);
  CHECK(std::abs(m.variance[0].value - 1.0) <= 3.0 * m.variance[0].stderr_);
}

TEST_CASE("ks critical constants") {
  CHECK(stats::ks_critical_constant(0.01) == doctest::Approx(1.628).epsilon(1e-3));
  CHECK(stats::ks_critical_constant(0.05) == doctest::Approx(1.358).epsilon(1e-3));
}

TEST_CASE("ks invariant under increasing transforms") {
  Rng rng(5);
  std::vector<double> base(2000);
  for (auto& x : base) x = rng.uniform();

  const auto id = stats::ks_test(
      base, [](double t) { return std::clamp(t, 0.0, 1.0); }, 0.01);

  // monotone maps with the transformed cdf written directly
  auto check = [&](auto f, auto cdf) {
    std::vector<double> mapped;
    mapped.reserve(base.size());
    for (double x : base) mapped.push_back(f(x));
    const auto res = stats::ks_test(mapped, cdf, 0.01);
    CHECK(res.statistic == doctest::Approx(id.statistic).epsilon(1e-12));
  };
  check([](double x) { return 2.0 * x; },
        [](double t) { return std::clamp(t / 2.0, 0.0, 1.0); });
  check([](double x) { return x * x; },
        [](double t) { return std::clamp(std::sqrt(std::max(t, 0.0)), 0.0, 1.0); });
  check([](double x) { return std::exp(x); },
        [](double t) { return std::clamp(std::log(std::max(t, 1e-300)), 0.0, 1.0); });
  check([](double x) { return -1.0 / (x + 0.5); },
        [](double t) { return std::clamp(-1.0 / t - 0.5, 0.0, 1.0); });
  check([](double x) { return std::atan(x); },
        [](double t) { return std::clamp(std::tan(t), 0.0, 1.0); });
}

TEST_CASE("verdict boundaries") {
  stats::MCEstimate est{0.0840, 0.001, 1000};
  CHECK(stats::verdict(est, 1.0 / 12.0, 3.0, 0.2) == stats::Verdict::pass);
  est.value = 0.2;
  CHECK(stats::verdict(est, 1.0 / 12.0, 3.0, 0.2) == stats::Verdict::fail);
  est.stderr_ = 0.05;
  CHECK(stats::verdict(est, 1.0 / 12.0, 3.0, 0.2) ==
        stats::Verdict::inconclusive);
}

TEST_CASE("verdict monotone in stderr") {
  // shrinking stderr never flips fail -> pass at fixed value and target
  const double value = 0.09, target = 1.0 / 12.0;
  bool seen_pass_after_fail = false;
  bool failed_before = false;
  for (double se = 0.01; se > 1e-5; se *= 0.7) {
    const auto v = stats::verdict({value, se, 1000}, target, 3.0, 0.2);
    if (v == stats::Verdict::fail) failed_before = true;
    if (failed_before && v == stats::Verdict::pass)
      seen_pass_after_fail = true;
  }
  CHECK_FALSE(seen_pass_after_fail);
}

TEST_CASE("two-sample ks separates distinct laws and accepts equal ones") {
  Rng rng(9);
  std::vector<double> a(4000), b(4000), c(4000);
  for (auto& x : a) x = rng.gaussian();
  for (auto& x : b) x = rng.gaussian();
  for (auto& x : c) x = rng.gaussian() + 0.5;
  CHECK(stats::ks_test_two_sample(a, b, 0.01).pass);
  CHECK_FALSE(stats::ks_test_two_sample(a, c, 0.01).pass);
}
