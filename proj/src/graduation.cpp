#include "gradlim/graduation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gradlim/parallel.hpp"
#include "gradlim/quadrature.hpp"

namespace gradlim::graduation {

namespace {

constexpr std::uint64_t kBlockSize = 1 << 14;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = salt;
  return a ^ splitmix64(s);
}

double pow2(int n) { return std::ldexp(1.0, n); }

/// E[g(Y)] for an arbitrary-dimension law: density quadrature when 1-d,
/// auxiliary Monte Carlo otherwise.
double expect_vec(const measures::ProbabilityLaw& law,
                  const std::function<double(const Eigen::VectorXd&)>& g,
                  std::uint64_t mc_budget, std::uint64_t seed) {
  if (law.dim == 1 && law.density) {
    return quad::integrate(
        [&](double x) {
          Eigen::VectorXd v(1);
          v[0] = x;
          return g(v) * law.density(v);
        },
        law.support_lo, law.support_hi, 64);
  }
  auto block = [&](std::uint64_t lo, std::uint64_t hi) {
    stats::Accumulator acc;
    Rng rng = Rng::derive(mix_seed(seed, 0x7A51u), lo / kBlockSize);
    Eigen::VectorXd y(law.dim);
    for (std::uint64_t i = lo; i < hi; ++i) {
      law.sampler(rng, y);
      acc.add(g(y));
    }
    return acc;
  };
  auto acc = block_reduce<stats::Accumulator>(
      mc_budget, kBlockSize, block,
      [](const stats::Accumulator& a, const stats::Accumulator& b) {
        return a.merged(b);
      },
      {});
  return stats::finalize(acc).value;
}

double grad_sq_sum(const TestFunction& phi, const Eigen::VectorXd& y,
                   Eigen::VectorXd& buf) {
  phi.grad(y, buf);
  return buf.squaredNorm();
}

}  // namespace

std::string to_string(GradMode mode) {
  switch (mode) {
    case GradMode::nearest:
      return "nearest";
    case GradMode::by_default:
      return "default";
    case GradMode::by_excess:
      return "excess";
    case GradMode::dyadic:
      return "dyadic";
    default:
      return "custom";
  }
}

double GraduationScheme::alpha_bias() const {
  if (alpha_bias_override) return alpha_bias_override(n);
  switch (mode) {
    case GradMode::nearest:
      return static_cast<double>(n) * n;
    case GradMode::by_default:
    case GradMode::by_excess:
      return static_cast<double>(n);
    case GradMode::dyadic:
      return dyadic_c * pow2(2 * n);
    default:
      throw std::invalid_argument("custom scheme needs alpha_bias_override");
  }
}

double GraduationScheme::alpha_quadratic() const {
  if (alpha_quadratic_override) return alpha_quadratic_override(n);
  switch (mode) {
    case GradMode::dyadic:
      return dyadic_c * pow2(2 * n);
    case GradMode::custom:
      throw std::invalid_argument(
          "custom scheme needs alpha_quadratic_override");
    default:
      return static_cast<double>(n) * n;
  }
}

GraduationScheme nearest_scheme(int n) { return {GradMode::nearest, n}; }
GraduationScheme default_scheme(int n) { return {GradMode::by_default, n}; }
GraduationScheme excess_scheme(int n) { return {GradMode::by_excess, n}; }
GraduationScheme dyadic_scheme(int n, double c) {
  GraduationScheme s{GradMode::dyadic, n};
  s.dyadic_c = c;
  return s;
}

double scaled_error1(double y, GradMode mode, int n) {
  switch (mode) {
    case GradMode::nearest: {
      const double t = static_cast<double>(n) * y;
      return std::floor(t) + 0.5 - t;
    }
    case GradMode::by_default: {
      const double t = static_cast<double>(n) * y;
      return std::floor(t) - t;
    }
    case GradMode::by_excess: {
      const double t = static_cast<double>(n) * y;
      // Y_n - Y in (0, 1/n]: a point on a mark moves up a full step.
      return std::floor(t) + 1.0 - t;
    }
    case GradMode::dyadic: {
      if (!(y >= 0.0 && y < 1.0))
        throw std::invalid_argument("dyadic mode requires y in [0,1)");
      const double t = pow2(n) * y;
      return static_cast<double>(n) * (-0.5) * (t - std::floor(t)) / pow2(n);
    }
    default:
      throw std::invalid_argument("scaled_error1: custom mode needs a scheme");
  }
}

Eigen::VectorXd scaled_error(const Eigen::VectorXd& y,
                             const GraduationScheme& scheme) {
  if (scheme.mode == GradMode::custom) {
    if (!scheme.custom_xi)
      throw std::invalid_argument("custom scheme without custom_xi");
    Eigen::VectorXd xi(y.size());
    scheme.custom_xi(y, scheme.n, xi);
    return static_cast<double>(scheme.n) * xi;
  }
  if (scheme.mode == GradMode::dyadic && y.size() != 1)
    throw std::invalid_argument("dyadic mode requires dim = 1");
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    out[i] = scaled_error1(y[i], scheme.mode, scheme.n);
  return out;
}

double graduate1(double y, GradMode mode, int n) {
  if (mode == GradMode::dyadic) {
    const double t = pow2(n) * y;
    if (!(y >= 0.0 && y < 1.0))
      throw std::invalid_argument("dyadic mode requires y in [0,1)");
    return y - 0.5 * (t - std::floor(t)) / pow2(n);
  }
  return y + scaled_error1(y, mode, n) / static_cast<double>(n);
}

Eigen::VectorXd graduate(const Eigen::VectorXd& y,
                         const GraduationScheme& scheme) {
  if (scheme.mode == GradMode::custom)
    return y + scaled_error(y, scheme) / static_cast<double>(scheme.n);
  if (scheme.mode == GradMode::dyadic && y.size() != 1)
    throw std::invalid_argument("dyadic mode requires dim = 1");
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    out[i] = graduate1(y[i], scheme.mode, scheme.n);
  return out;
}

// ---------------------------------------------------------------------------

GammaReport estimate_gamma(const measures::ProbabilityLaw& law,
                           const TestFunction& phi,
                           const GraduationScheme& scheme,
                           const std::vector<int>& n_list,
                           std::uint64_t samples, std::uint64_t seed) {
  GammaReport report;
  Eigen::VectorXd gbuf(law.dim);
  report.grad_sq_expectation = expect_vec(
      law,
      [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd g(y.size());
        phi.grad(y, g);
        return g.squaredNorm();
      },
      10 * samples, mix_seed(seed, 0xA0u));
  report.target_from_density = law.dim == 1 && static_cast<bool>(law.density);

  switch (scheme.mode) {
    case GradMode::nearest:
      report.limit_constant = 1.0 / 12.0;
      break;
    case GradMode::by_default:
    case GradMode::by_excess:
      report.limit_constant = 1.0 / 3.0;
      break;
    case GradMode::dyadic:
      // pinned by the exact small-n summation oracle (see tests)
      report.limit_constant = scheme.dyadic_c / 12.0;
      break;
    default:
      report.limit_constant = 0.0;
  }
  report.target = report.limit_constant * report.grad_sq_expectation;

  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const GraduationScheme sch = scheme.with_n(n_list[ni]);
    const double alpha = sch.alpha_quadratic();
    const std::uint64_t seed_n = mix_seed(seed, 0xB000u + ni);
    auto block = [&](std::uint64_t lo, std::uint64_t hi) {
      stats::Accumulator acc;
      Rng rng = Rng::derive(seed_n, lo / kBlockSize);
      Eigen::VectorXd y(law.dim), yn(law.dim);
      for (std::uint64_t i = lo; i < hi; ++i) {
        law.sampler(rng, y);
        yn = graduate(y, sch);
        const double d = phi.value(yn) - phi.value(y);
        acc.add(alpha * d * d);
      }
      return acc;
    };
    auto acc = block_reduce<stats::Accumulator>(
        samples, kBlockSize, block,
        [](const stats::Accumulator& a, const stats::Accumulator& b) {
          return a.merged(b);
        },
        {});
    report.points.push_back({n_list[ni], stats::finalize(acc)});
  }
  return report;
}

// ---------------------------------------------------------------------------

BiasReport estimate_bias_operators(const measures::ProbabilityLaw& law,
                                   const TestFunction& phi,
                                   const TestFunction& chi,
                                   const GraduationScheme& scheme,
                                   const std::vector<int>& n_list,
                                   std::uint64_t samples, std::uint64_t seed,
                                   const CustomBiasSpec& custom) {
  BiasReport report;
  report.score_available = static_cast<bool>(law.score);
  const std::uint64_t target_budget = 10 * samples;
  const std::uint64_t target_seed = mix_seed(seed, 0xC0u);

  // Targets by mode.
  if (scheme.mode == GradMode::nearest && phi.laplacian) {
    report.targets.a_bar =
        expect_vec(law,
                   [&](const Eigen::VectorXd& y) {
                     return phi.laplacian(y) / 24.0 * chi.value(y);
                   },
                   target_budget, target_seed);
    if (law.score) {
      report.targets.a_tilde = expect_vec(
          law,
          [&](const Eigen::VectorXd& y) {
            Eigen::VectorXd g(y.size()), rho(y.size());
            phi.grad(y, g);
            law.score(y, rho);
            return (phi.laplacian(y) + g.dot(rho)) / 24.0 * chi.value(y);
          },
          target_budget, target_seed);
      report.targets.a_under = 2.0 * *report.targets.a_tilde -
                               *report.targets.a_bar;
      report.targets.a_slash = *report.targets.a_bar - *report.targets.a_tilde;
    }
    report.targets.gamma = expect_vec(
        law,
        [&](const Eigen::VectorXd& y) {
          Eigen::VectorXd g(y.size());
          phi.grad(y, g);
          return g.squaredNorm() / 12.0 * chi.value(y);
        },
        target_budget, target_seed);
  } else if (scheme.mode == GradMode::by_default ||
             scheme.mode == GradMode::by_excess) {
    const double sign = scheme.mode == GradMode::by_default ? -0.5 : 0.5;
    const double e = expect_vec(
        law,
        [&](const Eigen::VectorXd& y) {
          Eigen::VectorXd g(y.size());
          phi.grad(y, g);
          return g.sum() * chi.value(y);
        },
        target_budget, target_seed);
    report.targets.a_bar = sign * e;
    report.targets.a_under = -sign * e;
    report.targets.a_tilde = 0.0;
    report.targets.a_slash = sign * e;
    report.targets.gamma = 0.0;  // vanishes at the first-order scaling
  } else if (scheme.mode == GradMode::custom && custom.gamma_const &&
             phi.laplacian) {
    const double gc = *custom.gamma_const;
    report.targets.a_bar =
        expect_vec(law,
                   [&](const Eigen::VectorXd& y) {
                     return 0.5 * gc * phi.laplacian(y) * chi.value(y);
                   },
                   target_budget, target_seed);
    if (law.score) {
      report.targets.a_tilde = expect_vec(
          law,
          [&](const Eigen::VectorXd& y) {
            Eigen::VectorXd g(y.size()), rho(y.size());
            phi.grad(y, g);
            law.score(y, rho);
            return (0.5 * gc * phi.laplacian(y) + gc * g.dot(rho)) *
                   chi.value(y);
          },
          target_budget, target_seed);
      report.targets.a_under = 2.0 * *report.targets.a_tilde -
                               *report.targets.a_bar;
      report.targets.a_slash = *report.targets.a_bar - *report.targets.a_tilde;
    }
    // gamma-weighted square field (the unweighted sum-of-products form does
    // not reproduce the quadratic pairing; see the report consumers)
    report.targets.gamma = expect_vec(
        law,
        [&](const Eigen::VectorXd& y) {
          Eigen::VectorXd g(y.size());
          phi.grad(y, g);
          return gc * g.squaredNorm() * chi.value(y);
        },
        target_budget, target_seed);
  }

  struct Acc {
    stats::Accumulator bar, under, tilde, slash, gamma, fourth;
    Acc merged(const Acc& o) const {
      return {bar.merged(o.bar),     under.merged(o.under),
              tilde.merged(o.tilde), slash.merged(o.slash),
              gamma.merged(o.gamma), fourth.merged(o.fourth)};
    }
  };

  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const GraduationScheme sch = scheme.with_n(n_list[ni]);
    const double alpha = sch.alpha_bias();
    const std::uint64_t seed_n = mix_seed(seed, 0xD000u + ni);
    auto block = [&](std::uint64_t lo, std::uint64_t hi) {
      Acc acc;
      Rng rng = Rng::derive(seed_n, lo / kBlockSize);
      Eigen::VectorXd y(law.dim), yn(law.dim);
      for (std::uint64_t i = lo; i < hi; ++i) {
        law.sampler(rng, y);
        yn = graduate(y, sch);
        const double d = phi.value(yn) - phi.value(y);
        const double cy = chi.value(y);
        const double cn = chi.value(yn);
        const double bar_v = alpha * d * cy;
        const double under_v = alpha * (-d) * cn;
        acc.bar.add(bar_v);
        acc.under.add(under_v);
        acc.tilde.add(0.5 * (bar_v + under_v));
        acc.slash.add(0.5 * (bar_v - under_v));
        acc.gamma.add(alpha * d * d * 0.5 * (cn + cy));
        acc.fourth.add(alpha * d * d * d * d);
      }
      return acc;
    };
    Acc acc = block_reduce<Acc>(
        samples, kBlockSize, block,
        [](const Acc& a, const Acc& b) { return a.merged(b); }, {});
    BiasEstimates est;
    est.n = n_list[ni];
    est.a_bar = stats::finalize(acc.bar);
    est.a_under = stats::finalize(acc.under);
    est.a_tilde = stats::finalize(acc.tilde);
    est.a_slash = stats::finalize(acc.slash);
    // half-sum / half-difference identities hold exactly on the values
    est.a_tilde.value = 0.5 * (est.a_bar.value + est.a_under.value);
    est.a_slash.value = 0.5 * (est.a_bar.value - est.a_under.value);
    est.gamma = stats::finalize(acc.gamma);
    est.fourth_moment = stats::finalize(acc.fourth);
    report.per_n.push_back(est);
  }
  return report;
}

// ---------------------------------------------------------------------------

GammaConsistencyReport gamma_consistency_check(
    const measures::ProbabilityLaw& law, const TestFunction& phi,
    const TestFunction& chi, const GraduationScheme& scheme,
    std::uint64_t samples, std::uint64_t seed) {
  const TestFunction phi_sq = fns::squared(phi);
  const TestFunction phi_chi = fns::product(phi, chi);
  const double alpha = scheme.alpha_quadratic();

  struct Acc {
    stats::Accumulator direct, comb;
    Acc merged(const Acc& o) const {
      return {direct.merged(o.direct), comb.merged(o.comb)};
    }
  };
  auto block = [&](std::uint64_t lo, std::uint64_t hi) {
    Acc acc;
    Rng rng = Rng::derive(mix_seed(seed, 0xE0u), lo / kBlockSize);
    Eigen::VectorXd y(law.dim), yn(law.dim);
    for (std::uint64_t i = lo; i < hi; ++i) {
      law.sampler(rng, y);
      yn = graduate(y, scheme);
      const double d = phi.value(yn) - phi.value(y);
      const double cy = chi.value(y);
      const double cn = chi.value(yn);
      acc.direct.add(alpha * d * d * 0.5 * (cn + cy));
      // A~[phi^2] paired with chi, minus 2 A~[phi] paired with phi*chi
      const double t1 = -(alpha / 2.0) *
                        (phi_sq.value(yn) - phi_sq.value(y)) * (cn - cy);
      const double t2 = -(alpha / 2.0) * d *
                        (phi_chi.value(yn) - phi_chi.value(y));
      acc.comb.add(t1 - 2.0 * t2);
    }
    return acc;
  };
  Acc acc = block_reduce<Acc>(
      samples, kBlockSize, block,
      [](const Acc& a, const Acc& b) { return a.merged(b); }, {});

  GammaConsistencyReport report;
  report.n = scheme.n;
  report.direct = stats::finalize(acc.direct);
  report.combination = stats::finalize(acc.comb);
  if (scheme.mode == GradMode::nearest) {
    report.target = expect_vec(
        law,
        [&](const Eigen::VectorXd& y) {
          Eigen::VectorXd g(y.size());
          phi.grad(y, g);
          return g.squaredNorm() / 12.0 * chi.value(y);
        },
        10 * samples, mix_seed(seed, 0xE1u));
  }
  const double comb_err = std::hypot(report.direct.stderr_,
                                     report.combination.stderr_);
  const double gap = std::abs(report.direct.value - report.combination.value);
  report.discrepancy_sigmas = gap == 0.0 ? 0.0 : gap / std::max(comb_err, 1e-300);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

UniformityRow uniformity_row(
    const std::function<void(Rng&, Eigen::Ref<Eigen::VectorXd>,
                             Eigen::Ref<Eigen::VectorXd>, double&)>& draw,
    int dim, int n, std::uint64_t samples, std::uint64_t seed,
    double ks_level,
    const std::function<std::complex<double>(double)>& char_exact,
    const std::optional<PsiMomentSpec>& psi) {
  // draw fills v (the candidate uniforms, in [0,1)^dim) and reports the
  // conditioning scalar x used for the character and correlation checks.
  UniformityRow row;
  row.n = n;

  std::vector<std::vector<double>> comp(dim);
  for (auto& c : comp) c.reserve(samples);

  struct CharSpec {
    int k;
    double zeta;
  };
  const std::vector<CharSpec> char_specs = {
      {1, 1.0}, {2, 0.7}, {1, 0.0}, {0, 1.0}};
  std::vector<stats::ComplexAccumulator> char_acc(char_specs.size());
  stats::Accumulator psi_acc;
  // sums for corr(theta-part, x)
  double sx = 0, sv = 0, sxx = 0, svv = 0, sxv = 0;

  Rng rng = Rng::derive(seed, 0);
  Eigen::VectorXd v(dim), dummy(dim);
  double x = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    draw(rng, v, dummy, x);
    for (int c = 0; c < dim; ++c) comp[static_cast<std::size_t>(c)].push_back(v[c]);
    const double vsum = v.sum();
    for (std::size_t s = 0; s < char_specs.size(); ++s) {
      const double phase = kTwoPi * char_specs[s].k * vsum +
                           char_specs[s].zeta * x;
      char_acc[s].add(std::exp(std::complex<double>(0.0, phase)));
    }
    if (psi) psi_acc.add(psi->psi(v[0]));
    const double t0 = v[0] - 0.5;
    sx += x;
    sv += t0;
    sxx += x * x;
    svv += t0 * t0;
    sxv += x * t0;
  }

  for (int c = 0; c < dim; ++c)
    row.ks_per_component.push_back(stats::ks_test(
        comp[static_cast<std::size_t>(c)],
        [](double t) { return std::clamp(t, 0.0, 1.0); }, ks_level));

  for (std::size_t s = 0; s < char_specs.size(); ++s) {
    CharCheck check;
    check.k = char_specs[s].k;
    check.zeta = char_specs[s].zeta;
    const auto est = stats::finalize(char_acc[s]);
    std::complex<double> target = 0.0;
    if (char_specs[s].k == 0) {
      if (!char_exact) continue;  // no exact reference available
      target = char_exact(char_specs[s].zeta);
    }
    check.deviation = std::abs(
        std::complex<double>(est.re.value, est.im.value) - target);
    check.stderr_ = est.abs_stderr();
    row.char_checks.push_back(check);
  }

  if (psi) row.psi_moment = stats::finalize(psi_acc);

  const double nn = static_cast<double>(samples);
  const double cov = sxv / nn - (sx / nn) * (sv / nn);
  const double vx = sxx / nn - (sx / nn) * (sx / nn);
  const double vv = svv / nn - (sv / nn) * (sv / nn);
  stats::MCEstimate corr;
  corr.count = samples;
  corr.value = (vx > 0 && vv > 0) ? cov / std::sqrt(vx * vv) : 0.0;
  corr.stderr_ = (1.0 - corr.value * corr.value) / std::sqrt(nn);
  row.corr_with_y = corr;
  return row;
}

}  // namespace

UniformityReport uniformity_independence_test(
    const measures::ProbabilityLaw& law, const GraduationScheme& scheme,
    const std::vector<int>& n_list, std::uint64_t samples, std::uint64_t seed,
    double ks_level, const std::optional<PsiMomentSpec>& psi) {
  UniformityReport report;
  if (psi) report.psi_integral = psi->integral;

  std::function<std::complex<double>(double)> char_exact;
  if (law.char_fn_exact) {
    char_exact = [&law](double zeta) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(law.dim);
      u[0] = zeta;
      return law.char_fn_exact(u);
    };
  }

  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const GraduationScheme sch = scheme.with_n(n_list[ni]);
    auto draw = [&law, &sch](Rng& rng, Eigen::Ref<Eigen::VectorXd> v,
                             Eigen::Ref<Eigen::VectorXd> ybuf, double& x) {
      law.sampler(rng, ybuf);
      const Eigen::VectorXd se = scaled_error(ybuf, sch);
      for (Eigen::Index c = 0; c < v.size(); ++c) {
        double t = 0.5 + se[c];
        t -= std::floor(t);
        v[c] = t;
      }
      x = ybuf[0];
    };
    report.rows.push_back(uniformity_row(draw, law.dim, n_list[ni], samples,
                                         mix_seed(seed, 0xF000u + ni),
                                         ks_level, char_exact, psi));
  }
  return report;
}

UniformityReport uniformity_pair_test(const measures::ProbabilityLaw& law_x,
                                      const measures::ProbabilityLaw& law_y,
                                      const std::vector<int>& n_list,
                                      std::uint64_t samples,
                                      std::uint64_t seed, double ks_level) {
  if (law_x.dim != 1 || law_y.dim != 1)
    throw std::invalid_argument("uniformity_pair_test: laws must be 1-d");
  UniformityReport report;
  std::function<std::complex<double>(double)> char_exact;
  if (law_x.char_fn_exact) {
    char_exact = [&law_x](double zeta) {
      Eigen::VectorXd u(1);
      u[0] = zeta;
      return law_x.char_fn_exact(u);
    };
  }
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    auto draw = [&law_x, &law_y, n](Rng& rng, Eigen::Ref<Eigen::VectorXd> v,
                                    Eigen::Ref<Eigen::VectorXd> buf,
                                    double& x) {
      law_x.sampler(rng, buf);
      const double xv = buf[0];
      law_y.sampler(rng, buf);
      const double t = static_cast<double>(n) * xv + buf[0];
      v[0] = t - std::floor(t);
      x = xv;
    };
    report.rows.push_back(uniformity_row(draw, 1, n, samples,
                                         mix_seed(seed, 0xF800u + ni),
                                         ks_level, char_exact, std::nullopt));
  }
  return report;
}

// ---------------------------------------------------------------------------

WeightedGammaReport gamma_change_of_measure(
    const measures::ProbabilityLaw& law,
    const std::function<double(double)>& h, const TestFunction& phi,
    const GraduationScheme& scheme, std::uint64_t samples,
    std::uint64_t seed) {
  if (law.dim != 1)
    throw std::invalid_argument("gamma_change_of_measure: law must be 1-d");
  const double alpha = scheme.alpha_quadratic();

  struct Acc {
    std::uint64_t count = 0;
    double sw = 0, swv = 0, sw2 = 0, sw2v = 0, sw2v2 = 0;
    bool bad_weight = false;
    Acc merged(const Acc& o) const {
      return {count + o.count, sw + o.sw,     swv + o.swv,
              sw2 + o.sw2,    sw2v + o.sw2v, sw2v2 + o.sw2v2,
              bad_weight || o.bad_weight};
    }
  };
  auto block = [&](std::uint64_t lo, std::uint64_t hi) {
    Acc acc;
    Rng rng = Rng::derive(mix_seed(seed, 0x11u), lo / kBlockSize);
    Eigen::VectorXd y(1), yn(1);
    for (std::uint64_t i = lo; i < hi; ++i) {
      law.sampler(rng, y);
      const double w = h(y[0]);
      if (!(w > 0.0)) {
        acc.bad_weight = true;
        continue;
      }
      yn = graduate(y, scheme);
      const double d = phi.value(yn) - phi.value(y);
      const double v = alpha * d * d;
      acc.count += 1;
      acc.sw += w;
      acc.swv += w * v;
      acc.sw2 += w * w;
      acc.sw2v += w * w * v;
      acc.sw2v2 += w * w * v * v;
    }
    return acc;
  };
  Acc acc = block_reduce<Acc>(
      samples, kBlockSize, block,
      [](const Acc& a, const Acc& b) { return a.merged(b); }, {});
  if (acc.bad_weight)
    throw std::invalid_argument(
        "gamma_change_of_measure: h must be positive on all samples");

  const double nn = static_cast<double>(acc.count);
  const double mean_w = acc.sw / nn;
  const double ratio = acc.swv / acc.sw;
  // delta-method variance of the self-normalized estimator
  const double infl2 = (acc.sw2v2 - 2.0 * ratio * acc.sw2v +
                        ratio * ratio * acc.sw2) /
                       nn;
  WeightedGammaReport report;
  report.n = scheme.n;
  report.estimate.value = ratio;
  report.estimate.count = acc.count;
  report.estimate.stderr_ =
      std::sqrt(std::max(infl2, 0.0) / nn) / mean_w;
  report.normalization = mean_w;
  report.limit_constant =
      scheme.mode == GradMode::nearest ? 1.0 / 12.0
      : scheme.mode == GradMode::dyadic ? scheme.dyadic_c / 12.0
                                        : 1.0 / 3.0;

  // weighted target from the same integrand routine as the unweighted one
  const std::uint64_t tseed = mix_seed(seed, 0x12u);
  auto weighted_integrand = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd g(1);
    phi.grad(y, g);
    return h(y[0]) * g.squaredNorm();
  };
  const double num = expect_vec(law, weighted_integrand, 10 * samples, tseed);
  const double den = expect_vec(
      law, [&](const Eigen::VectorXd& y) { return h(y[0]); }, 10 * samples,
      tseed);
  report.target = report.limit_constant * num / den;
  return report;
}

double law_expectation(const measures::ProbabilityLaw& law,
                       const std::function<double(double)>& g,
                       std::uint64_t mc_budget, std::uint64_t seed) {
  if (law.dim != 1)
    throw std::invalid_argument("law_expectation: law must be 1-d");
  return expect_vec(
      law, [&](const Eigen::VectorXd& y) { return g(y[0]); }, mc_budget, seed);
}

}  // namespace gradlim::graduation
