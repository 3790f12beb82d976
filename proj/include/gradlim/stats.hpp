#ifndef GRADLIM_STATS_HPP
#define GRADLIM_STATS_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gradlim::stats {

/// Mergeable sufficient statistics (count, sum, sum of squares) for a
/// scalar Monte Carlo estimator.
struct Accumulator {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    sum_sq += x * x;
  }
  Accumulator merged(const Accumulator& o) const {
    return {count + o.count, sum + o.sum, sum_sq + o.sum_sq};
  }
};

/// Point estimate with its standard error.
struct MCEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t count = 0;
};

MCEstimate finalize(const Accumulator& acc);

/// Complex-valued estimate reported as (re, im) with per-component errors.
struct ComplexEstimate {
  MCEstimate re;
  MCEstimate im;
  double abs() const { return std::hypot(re.value, im.value); }
  /// Conservative scalar error for modulus comparisons.
  double abs_stderr() const { return std::hypot(re.stderr_, im.stderr_); }
};

struct ComplexAccumulator {
  Accumulator re;
  Accumulator im;
  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  ComplexAccumulator merged(const ComplexAccumulator& o) const {
    return {re.merged(o.re), im.merged(o.im)};
  }
};

inline ComplexEstimate finalize(const ComplexAccumulator& acc) {
  return {finalize(acc.re), finalize(acc.im)};
}

struct KSResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool pass = false;
};

/// Asymptotic critical constant: 1.628 at 1%, 1.358 at 5%.
double ks_critical_constant(double level);

/// One-sample Kolmogorov-Smirnov against a given CDF. Requires >= 50
/// samples; the critical value is c(level)/sqrt(count).
KSResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf, double level);

/// Two-sample KS with critical value c(level)*sqrt((n+m)/(n*m)).
KSResult ks_test_two_sample(std::vector<double> a, std::vector<double> b,
                            double level);

double normal_cdf(double x, double mean = 0.0, double stddev = 1.0);

/// Sample mean, unbiased variance, and covariance matrix with standard
/// errors. Rows of `samples` are observations.
struct Moments {
  std::vector<MCEstimate> mean;
  std::vector<MCEstimate> variance;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd covariance_stderr;
  std::uint64_t count = 0;
};

Moments mc_moments(const Eigen::MatrixXd& samples);

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

/// Pass iff |value - target| <= k_sigma * stderr; inconclusive when the
/// budget cannot support the comparison (stderr above inconclusive_frac of
/// the target magnitude, floored to avoid zero targets).
Verdict verdict(const MCEstimate& est, double target, double k_sigma,
                double inconclusive_frac, double floor_abs = 1e-3);

}  // namespace gradlim::stats

#endif
