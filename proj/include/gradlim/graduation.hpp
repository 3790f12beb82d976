#ifndef GRADLIM_GRADUATION_HPP
#define GRADLIM_GRADUATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gradlim/measures.hpp"
#include "gradlim/stats.hpp"
#include "gradlim/test_function.hpp"

namespace gradlim::graduation {

/// theta(x) = 1/2 - {x}, the centered fractional part; range (-1/2, 1/2],
/// period 1. The entire part is floor(x), so {x} lies in [0,1) for
/// negative x too.
inline double theta(double x) { return 0.5 - (x - std::floor(x)); }

enum class GradMode { nearest, by_default, by_excess, dyadic, custom };

std::string to_string(GradMode mode);

/// Deterministic perturbation Y -> Y_n at resolution n, with the bias
/// scaling alpha_n attached to the scheme (n^2 for nearest, n for
/// default/excess, 4^n for dyadic). Quadratic-error estimation always uses
/// the quadratic scaling (n^2, or c*4^n for dyadic).
struct GraduationScheme {
  GradMode mode = GradMode::nearest;
  int n = 1;
  std::function<void(const Eigen::VectorXd&, int, Eigen::Ref<Eigen::VectorXd>)>
      custom_xi;
  std::function<double(int)> alpha_bias_override;
  std::function<double(int)> alpha_quadratic_override;
  double dyadic_c = 1.0;

  double alpha_bias() const;
  double alpha_quadratic() const;
  GraduationScheme with_n(int n_new) const {
    GraduationScheme s = *this;
    s.n = n_new;
    return s;
  }
};

GraduationScheme nearest_scheme(int n = 1);
GraduationScheme default_scheme(int n = 1);
GraduationScheme excess_scheme(int n = 1);
GraduationScheme dyadic_scheme(int n = 1, double c = 1.0);

/// n * (Y_n - Y), computed in the t = n*y domain so that the nearest-mode
/// identity with theta(n*y) is exact.
double scaled_error1(double y, GradMode mode, int n);
Eigen::VectorXd scaled_error(const Eigen::VectorXd& y,
                             const GraduationScheme& scheme);

double graduate1(double y, GradMode mode, int n);
Eigen::VectorXd graduate(const Eigen::VectorXd& y,
                         const GraduationScheme& scheme);

// ---------------------------------------------------------------------------
// Quadratic error (square field operator)

struct GammaPoint {
  int n = 0;
  stats::MCEstimate estimate;  // alpha_n E[(phi(Y_n)-phi(Y))^2]
};

struct GammaReport {
  std::vector<GammaPoint> points;
  double target = 0.0;             // limit constant * E[sum phi_i'^2]
  double grad_sq_expectation = 0.0;  // E[sum phi_i'(Y)^2]
  double limit_constant = 0.0;       // 1/12 nearest/dyadic, 1/3 default/excess
  bool target_from_density = false;
};

GammaReport estimate_gamma(const measures::ProbabilityLaw& law,
                           const TestFunction& phi,
                           const GraduationScheme& scheme,
                           const std::vector<int>& n_list,
                           std::uint64_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bias operators

/// Monte Carlo pairings of the four bias operators against chi, from one
/// shared sample batch. a_tilde and a_slash are the exact half-sum and
/// half-difference of a_bar and a_under.
struct BiasEstimates {
  int n = 0;
  stats::MCEstimate a_bar;
  stats::MCEstimate a_under;
  stats::MCEstimate a_tilde;
  stats::MCEstimate a_slash;
  stats::MCEstimate gamma;          // alpha_n E[(dphi)^2 (chi_n+chi)/2]
  stats::MCEstimate fourth_moment;  // alpha_n E[(dphi)^4], locality diagnostic
};

struct BiasTargets {
  std::optional<double> a_bar;
  std::optional<double> a_under;
  std::optional<double> a_tilde;
  std::optional<double> a_slash;
  std::optional<double> gamma;
};

struct BiasReport {
  std::vector<BiasEstimates> per_n;
  BiasTargets targets;
  bool score_available = false;
};

/// Optional diffusion matrix for custom perturbations (1-d: a single
/// constant), used to form the second-order target 1/2 * gamma * phi''.
struct CustomBiasSpec {
  std::optional<double> gamma_const;
};

BiasReport estimate_bias_operators(const measures::ProbabilityLaw& law,
                                   const TestFunction& phi,
                                   const TestFunction& chi,
                                   const GraduationScheme& scheme,
                                   const std::vector<int>& n_list,
                                   std::uint64_t samples, std::uint64_t seed,
                                   const CustomBiasSpec& custom = {});

// ---------------------------------------------------------------------------
// Square-field consistency: direct quadratic pairing vs the algebraic
// combination A~[phi^2] - 2 phi A~[phi].

struct GammaConsistencyReport {
  int n = 0;
  stats::MCEstimate direct;       // E[Gamma[phi] chi] via the (chi_n+chi)/2 pairing
  stats::MCEstimate combination;  // via A~ pairings of phi^2 and phi*chi
  std::optional<double> target;
  double discrepancy_sigmas = 0.0;
};

GammaConsistencyReport gamma_consistency_check(
    const measures::ProbabilityLaw& law, const TestFunction& phi,
    const TestFunction& chi, const GraduationScheme& scheme,
    std::uint64_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Weak convergence: uniformity of the scaled error and independence from Y

struct CharCheck {
  int k = 0;
  double zeta = 0.0;
  double deviation = 0.0;  // |Ehat - 1_{k=0} Psi_Y(zeta)|
  double stderr_ = 0.0;
};

struct UniformityRow {
  int n = 0;
  std::vector<stats::KSResult> ks_per_component;  // 1/2 + scaled error vs U(0,1)
  std::vector<CharCheck> char_checks;
  std::optional<stats::MCEstimate> psi_moment;  // Ehat[psi(V_n)]
  stats::MCEstimate corr_with_y;                // corr(theta(nY), Y)
};

struct UniformityReport {
  std::vector<UniformityRow> rows;
  std::optional<double> psi_integral;  // target of the psi moment test
};

/// Optional integrable test of Ehat[psi(V_n)] -> int_0^1 psi.
struct PsiMomentSpec {
  std::function<double(double)> psi;
  double integral = 0.0;
};

UniformityReport uniformity_independence_test(
    const measures::ProbabilityLaw& law, const GraduationScheme& scheme,
    const std::vector<int>& n_list, std::uint64_t samples, std::uint64_t seed,
    double ks_level = 0.01,
    const std::optional<PsiMomentSpec>& psi = std::nullopt);

/// Pair form: uniformity of {n X + Y} jointly with (X, Y), which holds iff
/// the law of X is Rajchman.
UniformityReport uniformity_pair_test(const measures::ProbabilityLaw& law_x,
                                      const measures::ProbabilityLaw& law_y,
                                      const std::vector<int>& n_list,
                                      std::uint64_t samples,
                                      std::uint64_t seed,
                                      double ks_level = 0.01);

// ---------------------------------------------------------------------------
// Change of measure: the square field operator is unchanged under a
// bounded positive density factor h.

struct WeightedGammaReport {
  int n = 0;
  stats::MCEstimate estimate;  // self-normalized importance-weighted quadratic error
  double target = 0.0;         // E_h[limit_constant * sum phi_i'^2]
  double limit_constant = 0.0;
  double normalization = 0.0;  // E[h]
};

WeightedGammaReport gamma_change_of_measure(
    const measures::ProbabilityLaw& law,
    const std::function<double(double)>& h, const TestFunction& phi,
    const GraduationScheme& scheme, std::uint64_t samples, std::uint64_t seed);

/// E[g(Y)] via quadrature against the density when the law has one, else an
/// auxiliary Monte Carlo run with `mc_budget` draws. Targets always use a
/// larger budget than the estimates they calibrate.
double law_expectation(const measures::ProbabilityLaw& law,
                       const std::function<double(double)>& g,
                       std::uint64_t mc_budget, std::uint64_t seed);

}  // namespace gradlim::graduation

#endif
