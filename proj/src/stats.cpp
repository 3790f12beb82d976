#include "gradlim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gradlim::stats {

MCEstimate finalize(const Accumulator& acc) {
  MCEstimate est;
  est.count = acc.count;
  if (acc.count == 0) return est;
  const double n = static_cast<double>(acc.count);
  est.value = acc.sum / n;
  if (acc.count >= 2) {
    double var = (acc.sum_sq - acc.sum * acc.sum / n) / (n - 1.0);
    var = std::max(var, 0.0);
    est.stderr_ = std::sqrt(var / n);
  }
  return est;
}

double ks_critical_constant(double level) {
  if (level <= 0.01) return 1.628;
  if (level <= 0.05) return 1.358;
  // K(c) = 1 - level via the Kolmogorov series, bisected.
  auto tail = [](double c) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k)
      s += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * c * c);
    return s;
  };
  double lo = 0.3, hi = 3.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

KSResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf, double level) {
  if (samples.size() < 50)
    throw std::invalid_argument("ks_test: need at least 50 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  KSResult r;
  r.statistic = d;
  r.critical_value = ks_critical_constant(level) / std::sqrt(n);
  r.pass = r.statistic < r.critical_value;
  return r;
}

KSResult ks_test_two_sample(std::vector<double> a, std::vector<double> b,
                            double level) {
  if (a.size() < 50 || b.size() < 50)
    throw std::invalid_argument("ks_test_two_sample: need at least 50 samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  KSResult r;
  r.statistic = d;
  r.critical_value =
      ks_critical_constant(level) * std::sqrt((na + nb) / (na * nb));
  r.pass = r.statistic < r.critical_value;
  return r;
}

double normal_cdf(double x, double mean, double stddev) {
  return 0.5 * std::erfc(-(x - mean) / (stddev * std::sqrt(2.0)));
}

Moments mc_moments(const Eigen::MatrixXd& samples) {
  const auto n = samples.rows();
  const auto d = samples.cols();
  if (n < 2) throw std::invalid_argument("mc_moments: need at least 2 samples");
  Moments m;
  m.count = static_cast<std::uint64_t>(n);
  const double nn = static_cast<double>(n);

  const Eigen::RowVectorXd mu = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mu;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (nn - 1.0);

  m.covariance = cov;
  m.covariance_stderr.resize(d, d);
  // stderr of cov(i,j) via the fourth-moment asymptotic:
  // Var[c_ij] ~ (E[(xi*xj)^2] - cov_ij^2) / n on centered data.
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::ArrayXd prod =
          centered.col(i).array() * centered.col(j).array();
      const double m2 = prod.square().mean() - cov(i, j) * cov(i, j);
      m.covariance_stderr(i, j) = std::sqrt(std::max(m2, 0.0) / nn);
    }

  for (Eigen::Index j = 0; j < d; ++j) {
    MCEstimate mean_est;
    mean_est.value = mu(j);
    mean_est.stderr_ = std::sqrt(cov(j, j) / nn);
    mean_est.count = m.count;
    m.mean.push_back(mean_est);

    MCEstimate var_est;
    var_est.value = cov(j, j);
    var_est.stderr_ = m.covariance_stderr(j, j);
    var_est.count = m.count;
    m.variance.push_back(var_est);
  }
  return m;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

Verdict verdict(const MCEstimate& est, double target, double k_sigma,
                double inconclusive_frac, double floor_abs) {
  const double scale = std::max(std::abs(target), floor_abs);
  if (est.stderr_ > inconclusive_frac * scale) return Verdict::inconclusive;
  return std::abs(est.value - target) <= k_sigma * est.stderr_
             ? Verdict::pass
             : Verdict::fail;
}

}  // namespace gradlim::stats
