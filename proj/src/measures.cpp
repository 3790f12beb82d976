#include "gradlim/measures.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gradlim/parallel.hpp"

namespace gradlim::measures {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ProbabilityLaw normal_law(double mean, double stddev) {
  if (stddev <= 0.0) throw std::invalid_argument("normal_law: stddev <= 0");
  ProbabilityLaw law;
  law.name = "normal";
  law.sampler = [mean, stddev](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    out[0] = mean + stddev * rng.gaussian();
  };
  law.char_fn_exact = [mean, stddev](const Eigen::VectorXd& u) {
    const double w = u[0];
    return std::exp(std::complex<double>(-0.5 * w * w * stddev * stddev,
                                         w * mean));
  };
  const double inv_var = 1.0 / (stddev * stddev);
  law.density = [mean, stddev, inv_var](const Eigen::VectorXd& x) {
    const double z = (x[0] - mean) / stddev;
    return std::exp(-0.5 * z * z) / (stddev * std::sqrt(kTwoPi));
  };
  law.score = [mean, inv_var](const Eigen::VectorXd& x,
                              Eigen::Ref<Eigen::VectorXd> out) {
    out[0] = -(x[0] - mean) * inv_var;
  };
  law.rajchman_expected = RajchmanTag::yes;
  law.support_lo = mean - 12.0 * stddev;
  law.support_hi = mean + 12.0 * stddev;
  return law;
}

ProbabilityLaw uniform_law(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("uniform_law: need a < b");
  ProbabilityLaw law;
  law.name = "uniform";
  law.sampler = [a, b](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    out[0] = a + (b - a) * rng.uniform();
  };
  law.char_fn_exact = [a, b](const Eigen::VectorXd& u) -> std::complex<double> {
    const double w = u[0];
    if (w == 0.0) return 1.0;
    const std::complex<double> iw(0.0, w);
    return (std::exp(iw * b) - std::exp(iw * a)) / (iw * (b - a));
  };
  law.density = [a, b](const Eigen::VectorXd& x) {
    return (x[0] >= a && x[0] <= b) ? 1.0 / (b - a) : 0.0;
  };
  law.rajchman_expected = RajchmanTag::yes;
  law.support_lo = a;
  law.support_hi = b;
  return law;
}

ProbabilityLaw dirac_law(double point) {
  ProbabilityLaw law;
  law.name = "dirac";
  law.sampler = [point](Rng&, Eigen::Ref<Eigen::VectorXd> out) {
    out[0] = point;
  };
  law.char_fn_exact = [point](const Eigen::VectorXd& u) {
    return std::exp(std::complex<double>(0.0, u[0] * point));
  };
  law.rajchman_expected = RajchmanTag::no;
  law.support_lo = point - 1.0;
  law.support_hi = point + 1.0;
  return law;
}

ProbabilityLaw cantor_law(const CantorParams& params) {
  if (!(params.beta > 0.0 && params.beta < 0.5))
    throw std::invalid_argument("cantor_law: beta must be in (0, 1/2)");
  if (params.sample_depth < 1)
    throw std::invalid_argument("cantor_law: sample_depth must be positive");
  ProbabilityLaw law;
  law.name = "cantor";
  const double beta = params.beta;
  const int depth = params.sample_depth;
  law.sampler = [beta, depth](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    // X = sum_k b_k (1-beta) beta^(k-1), fair i.i.d. digits b_k
    double x = 0.0;
    double scale = 1.0 - beta;
    for (int k = 0; k < depth; ++k) {
      if (rng.next_u64() >> 63) x += scale;
      scale *= beta;
    }
    out[0] = x;
  };
  law.char_fn_exact = [params](const Eigen::VectorXd& u) {
    return cantor_char_fn(params, u[0] / kTwoPi);
  };
  const auto pisot = pisot_catalog_check(beta);
  law.rajchman_expected = pisot.verdict == PisotVerdict::rajchman
                              ? RajchmanTag::yes
                          : pisot.verdict == PisotVerdict::non_rajchman
                              ? RajchmanTag::no
                              : RajchmanTag::unknown;
  law.support_lo = 0.0;
  law.support_hi = 1.0;
  return law;
}

ProbabilityLaw product_law(std::vector<ProbabilityLaw> components) {
  if (components.empty())
    throw std::invalid_argument("product_law: no components");
  for (const auto& c : components)
    if (c.dim != 1)
      throw std::invalid_argument("product_law: components must be 1-d");
  ProbabilityLaw law;
  law.dim = static_cast<int>(components.size());
  law.name = "product";
  auto comps = std::make_shared<std::vector<ProbabilityLaw>>(
      std::move(components));
  law.sampler = [comps](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    Eigen::VectorXd tmp(1);
    for (std::size_t i = 0; i < comps->size(); ++i) {
      (*comps)[i].sampler(rng, tmp);
      out[static_cast<Eigen::Index>(i)] = tmp[0];
    }
  };
  bool all_char = true;
  bool all_rajchman = true;
  for (const auto& c : *comps) {
    all_char = all_char && static_cast<bool>(c.char_fn_exact);
    all_rajchman = all_rajchman && c.rajchman_expected == RajchmanTag::yes;
  }
  if (all_char) {
    law.char_fn_exact = [comps](const Eigen::VectorXd& u) {
      std::complex<double> p = 1.0;
      Eigen::VectorXd ui(1);
      for (std::size_t i = 0; i < comps->size(); ++i) {
        ui[0] = u[static_cast<Eigen::Index>(i)];
        p *= (*comps)[i].char_fn_exact(ui);
      }
      return p;
    };
  }
  law.rajchman_expected =
      all_rajchman ? RajchmanTag::yes : RajchmanTag::unknown;
  return law;
}

Eigen::MatrixXd sample(const ProbabilityLaw& law, std::uint64_t count,
                       std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), law.dim);
  Eigen::VectorXd x(law.dim);
  Rng rng = Rng::derive(seed, 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    law.sampler(rng, x);
    out.row(static_cast<Eigen::Index>(i)) = x;
  }
  return out;
}

std::complex<double> cantor_char_fn(const CantorParams& params, double u) {
  if (!(params.beta > 0.0 && params.beta < 0.5))
    throw std::invalid_argument("cantor_char_fn: beta must be in (0, 1/2)");
  const double beta = params.beta;
  const double tol = params.product_truncation_tol;
  std::complex<double> p = 1.0;
  double geom = 1.0;  // beta^(k-1)
  // Remaining |log product| after factor k is bounded by pi*|u|*beta^(k-1).
  for (int k = 1; k <= 100000; ++k) {
    if (std::numbers::pi * std::abs(u) * geom < tol) break;
    double e = u * (1.0 - beta) * geom;
    e -= std::floor(e);  // exp(2*pi*i*e) is 1-periodic in e
    p *= 0.5 * (1.0 + std::exp(std::complex<double>(0.0, kTwoPi * e)));
    geom *= beta;
  }
  return p;
}

stats::ComplexEstimate char_fn_empirical(const Eigen::MatrixXd& samples,
                                         const Eigen::VectorXd& u) {
  if (samples.rows() < 2)
    throw std::invalid_argument("char_fn_empirical: need at least 2 samples");
  if (samples.cols() != u.size())
    throw std::invalid_argument("char_fn_empirical: dimension mismatch");
  stats::ComplexAccumulator acc;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double phase = samples.row(i).dot(u);
    acc.add(std::exp(std::complex<double>(0.0, phase)));
  }
  return stats::finalize(acc);
}

DecayReport rajchman_decay_test(const ProbabilityLaw& law,
                                const std::vector<double>& frequency_ladder,
                                double threshold, std::uint64_t mc_samples,
                                std::uint64_t seed) {
  if (frequency_ladder.size() < 2)
    throw std::invalid_argument("rajchman_decay_test: ladder too short");
  for (std::size_t i = 1; i < frequency_ladder.size(); ++i)
    if (!(frequency_ladder[i] > frequency_ladder[i - 1]))
      throw std::invalid_argument(
          "rajchman_decay_test: ladder must be strictly increasing");

  DecayReport report;
  report.exact_mode = static_cast<bool>(law.char_fn_exact);

  Eigen::MatrixXd draws;
  if (!report.exact_mode) draws = sample(law, mc_samples, seed);

  for (double u : frequency_ladder) {
    DecayEvidenceRow row;
    row.u = u;
    Eigen::VectorXd uv = Eigen::VectorXd::Constant(law.dim, u);
    if (report.exact_mode) {
      const auto z = law.char_fn_exact(uv);
      row.re = z.real();
      row.im = z.imag();
      row.abs = std::abs(z);
      row.stderr_ = 0.0;
    } else {
      const auto est = char_fn_empirical(draws, uv);
      row.re = est.re.value;
      row.im = est.im.value;
      row.abs = est.abs();
      row.stderr_ = est.abs_stderr();
    }
    report.evidence.push_back(row);
  }

  const std::size_t top = std::min<std::size_t>(3, report.evidence.size());
  bool all_below = true, all_above = true, budget_ok = true;
  for (std::size_t i = report.evidence.size() - top;
       i < report.evidence.size(); ++i) {
    const auto& row = report.evidence[i];
    if (!report.exact_mode && row.stderr_ > threshold / 2.0)
      budget_ok = false;
    all_below = all_below && (row.abs + row.stderr_ < threshold);
    all_above = all_above && (row.abs - row.stderr_ > threshold);
  }
  if (!budget_ok)
    report.verdict = DecayVerdict::inconclusive;
  else if (all_below)
    report.verdict = DecayVerdict::decaying;
  else if (all_above)
    report.verdict = DecayVerdict::non_decaying;
  else
    report.verdict = DecayVerdict::inconclusive;
  return report;
}

namespace {

struct PisotEntry {
  double value;
  std::string poly;
};

// Known Pisot numbers with 1/beta in (2, ...): minimal polynomial roots.
const std::vector<PisotEntry>& pisot_catalog() {
  static const std::vector<PisotEntry> catalog = {
      {(1.0 + std::sqrt(5.0)) / 2.0, "x^2 - x - 1"},
      {1.0 + std::sqrt(2.0), "x^2 - 2x - 1"},
      {(3.0 + std::sqrt(5.0)) / 2.0, "x^2 - 3x + 1"},
      {1.0 + std::sqrt(3.0), "x^2 - 2x - 2"},
      {2.0 + std::sqrt(2.0), "x^2 - 4x + 2"},
      {2.0 + std::sqrt(3.0), "x^2 - 4x + 1"},
      {(3.0 + std::sqrt(13.0)) / 2.0, "x^2 - 3x - 1"},
      {2.2055694304005903, "x^3 - 2x^2 - 1"},  // real root
      {2.2469796037174670, "x^3 - 2x^2 - x + 1"},
  };
  return catalog;
}

// Best rational approximation p/q with q <= q_max, by continued fractions.
bool nearly_rational(double r, long q_max, double tol, long& p_out,
                     long& q_out) {
  double x = r;
  long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(x)), q1 = 1;
  x -= std::floor(x);
  for (int it = 0; it < 64; ++it) {
    if (std::abs(r - static_cast<double>(p1) / q1) < tol) {
      p_out = p1;
      q_out = q1;
      return true;
    }
    if (x < 1e-15) break;
    x = 1.0 / x;
    const long a = static_cast<long>(std::floor(x));
    x -= std::floor(x);
    const long p2 = a * p1 + p0;
    const long q2 = a * q1 + q0;
    if (q2 > q_max) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return false;
}

}  // namespace

PisotCheck pisot_catalog_check(double beta) {
  if (!(beta > 0.0 && beta < 0.5))
    throw std::invalid_argument("pisot_catalog_check: beta not in (0, 1/2)");
  const double r = 1.0 / beta;
  PisotCheck check;

  const double nearest_int = std::round(r);
  if (nearest_int >= 2.0 && std::abs(r - nearest_int) < 1e-9) {
    check.verdict = PisotVerdict::non_rajchman;
    std::ostringstream os;
    os << "1/beta = " << nearest_int
       << " is an integer >= 2, hence a Pisot number";
    check.explanation = os.str();
    return check;
  }

  for (const auto& entry : pisot_catalog()) {
    if (std::abs(r - entry.value) < 1e-9) {
      check.verdict = PisotVerdict::non_rajchman;
      check.explanation = "1/beta matches the Pisot root of " + entry.poly;
      return check;
    }
  }

  long p = 0, q = 0;
  if (nearly_rational(r, 1000, 1e-9, p, q) && q > 1) {
    check.verdict = PisotVerdict::rajchman;
    std::ostringstream os;
    os << "1/beta = " << p << "/" << q
       << " is a rational non-integer, never an algebraic integer";
    check.explanation = os.str();
    return check;
  }

  check.verdict = PisotVerdict::unknown;
  check.explanation = "1/beta not in the catalog; no verdict";
  return check;
}

std::string decay_evidence_csv(const DecayReport& report) {
  std::ostringstream os;
  os << "u,re,im,abs,stderr\n";
  os.precision(17);
  for (const auto& row : report.evidence)
    os << row.u << "," << row.re << "," << row.im << "," << row.abs << ","
       << row.stderr_ << "\n";
  return os.str();
}

}  // namespace gradlim::measures
