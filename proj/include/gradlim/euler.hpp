#ifndef GRADLIM_EULER_HPP
#define GRADLIM_EULER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gradlim/paths.hpp"
#include "gradlim/stats.hpp"

namespace gradlim::euler {

/// Mechanical system class: the noise coefficient of X^1 depends only on
/// X^2, and X^2 carries no noise at all, so Ito and Stratonovich solutions
/// coincide.
///   dX^1 = f11(X^2) dB + f12(X^1, X^2) dt
///   dX^2 = f22(X^1, X^2) dt
struct MechanicalSDE {
  std::string name;
  std::function<double(double)> f11;
  std::function<double(double)> d_f11;
  std::function<double(double, double)> f12;
  std::function<double(double, double)> d1_f12;
  std::function<double(double, double)> d2_f12;
  std::function<double(double, double)> f22;
  std::function<double(double, double)> d1_f22;
  std::function<double(double, double)> d2_f22;
  Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
};

MechanicalSDE constant_sde(double f11 = 1.0, Eigen::Vector2d x0 = {0.0, 0.0});
/// f11(x2) = x2, f12 = 0, f22 = x1.
MechanicalSDE linear_sde(Eigen::Vector2d x0 = {1.0, 0.0});
/// f11(x2) = sin(x2), f12 = 0, f22 = x1, x0 = (0.5, 0.5).
MechanicalSDE sine_mechanical_sde();

/// Pair-valued path on the uniform grid.
struct PairPath {
  double horizon = 1.0;
  Eigen::ArrayXd x1;
  Eigen::ArrayXd x2;
  std::int64_t steps() const { return x1.size() - 1; }
};

/// Euler scheme on the grid of `brownian` (which must carry exactly n
/// steps over [0, 1] when called with resolution n). Non-finite coefficient
/// evaluations abort the replication.
PairPath euler_solve(const MechanicalSDE& sde,
                     const paths::SamplePath& brownian);

/// Fine-grid Euler proxy for the exact solution, restricted to a coarse
/// grid of `coarse_steps` points. The fine grid must be a multiple of the
/// coarse one, at least 64x finer.
PairPath reference_solve(const MechanicalSDE& sde,
                         const paths::SamplePath& fine_brownian,
                         std::int64_t coarse_steps);

/// The correlated drivers of the error-limit equation, built from one
/// Brownian path B and an independent W on the same grid:
///   dZ12 = dW/sqrt(12) + dB/2,  dZ21 = -dW/sqrt(12) + dB/2,  dZ22 = dt/2.
struct ErrorLimitDrivers {
  paths::SamplePath b;
  paths::SamplePath w;

  double dz12(std::int64_t i) const;
  double dz21(std::int64_t i) const;
  double dz22() const;  // per-step ds/2
};

/// Euler integration of the linearized error equation along the reference
/// solution X:
///   dU^i = sum_{k,j} d_k f^{ij}(X) U^k dY^j
///        - sum_{k,j,m} d_k f^{ij}(X) f^{km}(X) dZ^{mj},
/// with Y = (B, t), U_0 = 0, and only the Z-components above nonzero
/// (dZ11 = 0: no f11*f11 resonance term arises for this sparsity pattern).
PairPath simulate_error_limit(const MechanicalSDE& sde, const PairPath& x_ref,
                              const ErrorLimitDrivers& drivers);

struct ErrorCompareRow {
  int n = 0;
  // componentwise moments of n(X^n_1 - X_1) (lhs) and U_1 (rhs)
  stats::Moments lhs;
  stats::Moments rhs;
  Eigen::Vector2d lhs_cov_with_b;
  Eigen::Vector2d rhs_cov_with_b;
  Eigen::Vector2d cov_stderr;  // combined
  std::vector<stats::KSResult> ks_two_sample;  // per component
};

struct ErrorCompareReport {
  std::vector<ErrorCompareRow> rows;
};

/// Distributional comparison of the n-scaled Euler error at t = 1 with the
/// simulated limit process U, replication by replication on shared Brownian
/// paths with fresh independent W.
ErrorCompareReport error_distribution_compare(const MechanicalSDE& sde,
                                              const std::vector<int>& n_list,
                                              std::uint64_t replications,
                                              std::uint64_t seed,
                                              int refine = 64,
                                              double ks_level = 0.01);

}  // namespace gradlim::euler

#endif
