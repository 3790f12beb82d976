#ifndef GRADLIM_PATHS_HPP
#define GRADLIM_PATHS_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gradlim/rng.hpp"
#include "gradlim/stats.hpp"

namespace gradlim::paths {

/// Bounded Riemann-integrable function on [0,1), extended 1-periodically,
/// with its exact first two moments.
struct PeriodicFunction {
  std::string name;
  std::function<double(double)> eval_unit;  // on [0,1)
  double mean = 0.0;   // int_0^1 f
  double l2sq = 0.0;   // int_0^1 f^2
  double riemann_bound = 0.0;  // sup |f|

  double operator()(double s) const {
    return eval_unit(s - std::floor(s));
  }
  /// int_0^1 (f - mean)^2
  double centered_l2sq() const { return l2sq - mean * mean; }
};

/// theta(x) = 1/2 - {x}: mean 0, int theta^2 = 1/12 exactly.
PeriodicFunction theta_fn();
PeriodicFunction constant_fn(double c);
/// a*f + b*g pointwise; moments recomputed by Riemann sum, exact moments
/// only when one of a, b vanishes or f, g are orthogonal constants.
PeriodicFunction shifted(const PeriodicFunction& f, double c);

/// Scalar path on the uniform grid 0 = t_0 < ... < t_N = T.
struct SamplePath {
  double horizon = 1.0;
  Eigen::ArrayXd values;  // length N+1

  std::int64_t steps() const { return values.size() - 1; }
  double step() const { return horizon / static_cast<double>(steps()); }
  double time(std::int64_t i) const {
    return horizon * static_cast<double>(i) / static_cast<double>(steps());
  }
  Eigen::ArrayXd times() const;
};

/// CSV rows (t, value) for external plotting.
std::string to_csv(const SamplePath& path);

struct OscillatorySpec {
  PeriodicFunction f;
  int n = 1;
  int substeps_per_period = 64;  // K; grid step 1/(n*K)
};

SamplePath simulate_brownian(double horizon, std::int64_t steps, Rng& rng);
SamplePath simulate_brownian(double horizon, std::int64_t steps,
                             std::uint64_t seed);

/// t -> int_0^t f(n s) dB_s by left-point sums. Rejects a path grid coarser
/// than 1/(n*K).
SamplePath oscillatory_integral(const SamplePath& path,
                                const OscillatorySpec& spec);

/// Deterministic absolutely continuous time change t -> a(t), increasing,
/// a(0) = 0; identity when absent.
using TimeChange = std::function<double(double)>;

struct RootzenRow {
  int n = 0;
  stats::MCEstimate terminal_variance;
  double variance_target = 0.0;
  stats::MCEstimate covariance_with_b;
  double covariance_target = 0.0;
  stats::KSResult ks_vs_gaussian;
};

struct RootzenReport {
  std::vector<RootzenRow> rows;
};

/// Oscillatory Wiener integrals against (time-changed) Brownian motion:
/// terminal variance -> a(T) * int f^2, Gaussian limit law, covariance with
/// the driving motion -> a(T) * int f.
RootzenReport verify_rootzen_limit(const PeriodicFunction& f,
                                   const std::vector<int>& n_list, double T,
                                   std::uint64_t replications,
                                   std::uint64_t seed, int substeps = 64,
                                   double ks_level = 0.01,
                                   const TimeChange& time_change = nullptr);

/// The two n-scaled Euler-error integrals driven by one Brownian path:
///   I1(t) = n int_0^t (s - [ns]/n) dB_s   (left-point sums)
///   I2(t) = n int_0^t (B_s - B_{[ns]/n}) ds  (trapezoidal in time)
struct EulerErrorIntegrals {
  SamplePath i1;
  SamplePath i2;
};

EulerErrorIntegrals euler_error_integrals(const SamplePath& path, int n);

/// Piecewise-constant deterministic integrand on [0,1]; value[i] applies on
/// [breaks[i], breaks[i+1]) with implicit 0 and 1 endpoints.
struct StepFunction {
  std::vector<double> breaks;  // interior breakpoints, strictly increasing
  std::vector<double> values;  // size breaks.size() + 1

  double operator()(double t) const;
  double inner_product(const StepFunction& other) const;  // int_0^1 f g
  double l2sq() const;
};

struct QuadraticFormRow {
  int n = 0;
  stats::ComplexEstimate estimate;
  std::complex<double> target;
};

struct QuadraticFormReport {
  std::vector<QuadraticFormRow> rows;
  /// Halved constant of the associated closed bilinear form, recorded next
  /// to the unhalved limit the estimate targets.
  std::complex<double> dirichlet_form_constant;
};

/// n^2 E[(e^{i int eta dB^n} - e^{i int eta dB})(e^{i int zeta dB^n} -
/// e^{i int zeta dB})] with B^n = B + (1/n) int f(ns) dB, against the
/// Gaussian-functional target -exp(-1/2 int (eta+zeta)^2) int(eta zeta)
/// int f^2.
QuadraticFormReport quadratic_form_limit(const StepFunction& eta,
                                         const StepFunction& zeta,
                                         const PeriodicFunction& f,
                                         const std::vector<int>& n_list,
                                         std::uint64_t replications,
                                         std::uint64_t seed,
                                         int substeps = 64);

}  // namespace gradlim::paths

#endif
