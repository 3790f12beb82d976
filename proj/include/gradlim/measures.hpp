#ifndef GRADLIM_MEASURES_HPP
#define GRADLIM_MEASURES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gradlim/rng.hpp"
#include "gradlim/stats.hpp"

namespace gradlim::measures {

enum class RajchmanTag { yes, no, unknown };

/// A sampleable law on R^dim. The sampler writes one point per call and is
/// fully determined by the Rng stream it is handed. Characteristic function
/// uses the E[exp(i<u,X>)] convention.
struct ProbabilityLaw {
  int dim = 1;
  std::string name;
  std::function<void(Rng&, Eigen::Ref<Eigen::VectorXd>)> sampler;
  std::function<std::complex<double>(const Eigen::VectorXd&)> char_fn_exact;
  std::function<double(const Eigen::VectorXd&)> density;
  std::function<void(const Eigen::VectorXd&, Eigen::Ref<Eigen::VectorXd>)>
      score;
  RajchmanTag rajchman_expected = RajchmanTag::unknown;
  // quadrature window for density-based targets (1-d laws)
  double support_lo = -12.0;
  double support_hi = 12.0;

  double sample1(Rng& rng) const {
    Eigen::VectorXd x(1);
    sampler(rng, x);
    return x[0];
  }
};

struct CantorParams {
  double beta = 1.0 / 3.0;
  double product_truncation_tol = 1e-12;
  int sample_depth = 64;
};

ProbabilityLaw normal_law(double mean = 0.0, double stddev = 1.0);
ProbabilityLaw uniform_law(double a = 0.0, double b = 1.0);
ProbabilityLaw dirac_law(double point);
ProbabilityLaw cantor_law(const CantorParams& params);
/// Product of independent 1-d components.
ProbabilityLaw product_law(std::vector<ProbabilityLaw> components);

/// Draw `count` points (rows) from the law; reproducible for a fixed seed.
Eigen::MatrixXd sample(const ProbabilityLaw& law, std::uint64_t count,
                       std::uint64_t seed);

/// Characteristic function of the self-similar Cantor law in the
/// E[exp(2*pi*i*u*X)] convention:
///   Psi(u) = prod_{k>=1} (1 + exp(2*pi*i*u*(1-beta)*beta^(k-1))) / 2
/// truncated once the remaining factors are provably within
/// product_truncation_tol of 1.
std::complex<double> cantor_char_fn(const CantorParams& params, double u);

/// Empirical characteristic function with per-component standard errors.
stats::ComplexEstimate char_fn_empirical(const Eigen::MatrixXd& samples,
                                         const Eigen::VectorXd& u);

enum class DecayVerdict { decaying, non_decaying, inconclusive };

struct DecayEvidenceRow {
  double u = 0.0;
  double re = 0.0;
  double im = 0.0;
  double abs = 0.0;
  double stderr_ = 0.0;  // zero in exact mode
};

struct DecayReport {
  DecayVerdict verdict = DecayVerdict::inconclusive;
  std::vector<DecayEvidenceRow> evidence;
  bool exact_mode = false;
};

/// Tests |Psi| along a strictly increasing frequency ladder. Uses the exact
/// characteristic function when the law provides one, otherwise the
/// empirical one over `mc_samples` draws.
DecayReport rajchman_decay_test(const ProbabilityLaw& law,
                                const std::vector<double>& frequency_ladder,
                                double threshold, std::uint64_t mc_samples,
                                std::uint64_t seed);

enum class PisotVerdict { rajchman, non_rajchman, unknown };

struct PisotCheck {
  PisotVerdict verdict = PisotVerdict::unknown;
  std::string explanation;
};

/// Classifies the Cantor parameter: the limit measure is Rajchman iff
/// 1/beta is not a Pisot number. Catalog lookup: integers >= 2, a fixed
/// list of known Pisot numbers (matched within 1e-9 via their minimal
/// polynomials), rational non-integers (never algebraic integers).
PisotCheck pisot_catalog_check(double beta);

/// CSV rows (u, re, im, abs, stderr) for an evidence table.
std::string decay_evidence_csv(const DecayReport& report);

}  // namespace gradlim::measures

#endif
