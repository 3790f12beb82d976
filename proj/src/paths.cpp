#include "gradlim/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "gradlim/parallel.hpp"

namespace gradlim::paths {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = salt;
  return a ^ splitmix64(s);
}

constexpr std::uint64_t kRepBlock = 256;

}  // namespace

PeriodicFunction theta_fn() {
  PeriodicFunction f;
  f.name = "theta";
  f.eval_unit = [](double x) { return 0.5 - x; };
  f.mean = 0.0;
  f.l2sq = 1.0 / 12.0;
  f.riemann_bound = 0.5;
  return f;
}

PeriodicFunction constant_fn(double c) {
  PeriodicFunction f;
  f.name = "constant";
  f.eval_unit = [c](double) { return c; };
  f.mean = c;
  f.l2sq = c * c;
  f.riemann_bound = std::abs(c);
  return f;
}

PeriodicFunction shifted(const PeriodicFunction& f, double c) {
  PeriodicFunction g;
  g.name = f.name + "+const";
  auto base = f.eval_unit;
  g.eval_unit = [base, c](double x) { return base(x) + c; };
  g.mean = f.mean + c;
  g.l2sq = f.l2sq + 2.0 * c * f.mean + c * c;
  g.riemann_bound = f.riemann_bound + std::abs(c);
  return g;
}

Eigen::ArrayXd SamplePath::times() const {
  return Eigen::ArrayXd::LinSpaced(values.size(), 0.0, horizon);
}

std::string to_csv(const SamplePath& path) {
  std::ostringstream out;
  out << "t,value\n";
  char buf[64];
  for (std::int64_t i = 0; i <= path.steps(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", path.time(i),
                  path.values[i]);
    out << buf;
  }
  return out.str();
}

SamplePath simulate_brownian(double horizon, std::int64_t steps, Rng& rng) {
  if (steps < 1)
    throw std::invalid_argument("simulate_brownian: steps must be >= 1");
  SamplePath path;
  path.horizon = horizon;
  path.values.resize(steps + 1);
  path.values[0] = 0.0;
  const double sd = std::sqrt(horizon / static_cast<double>(steps));
  for (std::int64_t i = 0; i < steps; ++i)
    path.values[i + 1] = path.values[i] + sd * rng.gaussian();
  return path;
}

SamplePath simulate_brownian(double horizon, std::int64_t steps,
                             std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0);
  return simulate_brownian(horizon, steps, rng);
}

SamplePath oscillatory_integral(const SamplePath& path,
                                const OscillatorySpec& spec) {
  const double h = path.step();
  const double required =
      1.0 / (static_cast<double>(spec.n) * spec.substeps_per_period);
  if (h > required * (1.0 + 1e-9))
    throw std::invalid_argument(
        "oscillatory_integral: path grid coarser than 1/(n*K)");
  SamplePath out;
  out.horizon = path.horizon;
  out.values.resize(path.values.size());
  out.values[0] = 0.0;
  const double n = spec.n;
  for (std::int64_t i = 0; i < path.steps(); ++i) {
    const double t = path.time(i);
    out.values[i + 1] =
        out.values[i] + spec.f(n * t) * (path.values[i + 1] - path.values[i]);
  }
  return out;
}

RootzenReport verify_rootzen_limit(const PeriodicFunction& f,
                                   const std::vector<int>& n_list, double T,
                                   std::uint64_t replications,
                                   std::uint64_t seed, int substeps,
                                   double ks_level,
                                   const TimeChange& time_change) {
  if (substeps < 8)
    throw std::invalid_argument("verify_rootzen_limit: K must be >= 8");
  RootzenReport report;
  const double aT = time_change ? time_change(T) : T;

  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    const auto steps =
        static_cast<std::int64_t>(std::llround(T * n * substeps));
    const double h = T / static_cast<double>(steps);

    // per-cell integrand values and increment standard deviations; the
    // deterministic integrand is sampled at cell midpoints so that exact
    // nullities (e.g. the zero mean of theta over a period) survive the
    // discretization instead of leaving an O(1/K) drift
    Eigen::ArrayXd coeff(steps), inc_sd(steps);
    for (std::int64_t i = 0; i < steps; ++i) {
      const double t = h * (static_cast<double>(i) + 0.5);
      coeff[i] = f(n * t);
      if (time_change) {
        const double da = time_change(h * (i + 1.0)) - time_change(h * i);
        if (da < 0.0)
          throw std::invalid_argument("time change must be increasing");
        inc_sd[i] = std::sqrt(da);
      } else {
        inc_sd[i] = std::sqrt(h);
      }
    }

    Eigen::MatrixXd terminal(static_cast<Eigen::Index>(replications), 2);
    const std::uint64_t seed_n = mix_seed(seed, 0x5000u + ni);
    auto block = [&](std::uint64_t lo, std::uint64_t hi) {
      for (std::uint64_t r = lo; r < hi; ++r) {
        Rng rng = Rng::derive(seed_n, r);
        double z = 0.0, m = 0.0;
        for (std::int64_t i = 0; i < steps; ++i) {
          const double dm = inc_sd[i] * rng.gaussian();
          z += coeff[i] * dm;
          m += dm;
        }
        terminal(static_cast<Eigen::Index>(r), 0) = z;
        terminal(static_cast<Eigen::Index>(r), 1) = m;
      }
      return 0;
    };
    block_reduce<int>(replications, kRepBlock, block,
                      [](int, int) { return 0; }, 0);

    const auto moments = stats::mc_moments(terminal);
    RootzenRow row;
    row.n = n;
    row.terminal_variance = moments.variance[0];
    row.variance_target = f.l2sq * aT;
    row.covariance_with_b.value = moments.covariance(0, 1);
    row.covariance_with_b.stderr_ = moments.covariance_stderr(0, 1);
    row.covariance_with_b.count = replications;
    row.covariance_target = f.mean * aT;
    std::vector<double> z_samples(terminal.col(0).data(),
                                  terminal.col(0).data() + terminal.rows());
    const double limit_sd = std::sqrt(row.variance_target);
    row.ks_vs_gaussian = stats::ks_test(
        std::move(z_samples),
        [limit_sd](double x) { return stats::normal_cdf(x, 0.0, limit_sd); },
        ks_level);
    report.rows.push_back(row);
  }
  return report;
}

EulerErrorIntegrals euler_error_integrals(const SamplePath& path, int n) {
  const double h = path.step();
  const double ratio = 1.0 / (static_cast<double>(n) * h);
  const auto sub = static_cast<std::int64_t>(std::llround(ratio));
  if (sub < 1 || std::abs(ratio - static_cast<double>(sub)) > 1e-9)
    throw std::invalid_argument(
        "euler_error_integrals: grid must refine the 1/n partition");

  EulerErrorIntegrals out;
  out.i1.horizon = out.i2.horizon = path.horizon;
  out.i1.values.resize(path.values.size());
  out.i2.values.resize(path.values.size());
  out.i1.values[0] = out.i2.values[0] = 0.0;
  const double nn = n;
  for (std::int64_t i = 0; i < path.steps(); ++i) {
    const std::int64_t j = i % sub;        // substep within the coarse cell
    const std::int64_t base = i - j;       // index of the cell's left edge
    const double db = path.values[i + 1] - path.values[i];
    out.i1.values[i + 1] =
        out.i1.values[i] + nn * (static_cast<double>(j) * h) * db;
    const double g_avg = 0.5 * (path.values[i] + path.values[i + 1]) -
                         path.values[base];
    out.i2.values[i + 1] = out.i2.values[i] + nn * h * g_avg;
  }
  return out;
}

double StepFunction::operator()(double t) const {
  std::size_t i = 0;
  while (i < breaks.size() && t >= breaks[i]) ++i;
  return values[i];
}

double StepFunction::inner_product(const StepFunction& other) const {
  std::vector<double> cuts{0.0};
  cuts.insert(cuts.end(), breaks.begin(), breaks.end());
  cuts.insert(cuts.end(), other.breaks.begin(), other.breaks.end());
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    total += (*this)(mid)*other(mid)*len;
  }
  return total;
}

double StepFunction::l2sq() const { return inner_product(*this); }

QuadraticFormReport quadratic_form_limit(const StepFunction& eta,
                                         const StepFunction& zeta,
                                         const PeriodicFunction& f,
                                         const std::vector<int>& n_list,
                                         std::uint64_t replications,
                                         std::uint64_t seed, int substeps) {
  if (substeps < 8)
    throw std::invalid_argument("quadratic_form_limit: K must be >= 8");
  QuadraticFormReport report;

  const double ip_ee = eta.l2sq();
  const double ip_zz = zeta.l2sq();
  const double ip_ez = eta.inner_product(zeta);
  const std::complex<double> target =
      -std::exp(-0.5 * (ip_ee + 2.0 * ip_ez + ip_zz)) * ip_ez * f.l2sq;
  report.dirichlet_form_constant = 0.5 * target;

  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    const std::int64_t steps = static_cast<std::int64_t>(n) * substeps;
    const double h = 1.0 / static_cast<double>(steps);
    const double sqrt_h = std::sqrt(h);
    const double n2 = static_cast<double>(n) * n;
    const double inv_n = 1.0 / static_cast<double>(n);

    // midpoint sampling, as in verify_rootzen_limit
    Eigen::ArrayXd ce(steps), cez(steps), cz(steps), czz(steps);
    for (std::int64_t i = 0; i < steps; ++i) {
      const double t = h * (static_cast<double>(i) + 0.5);
      const double fv = f(static_cast<double>(n) * t);
      ce[i] = eta(t);
      cez[i] = eta(t) * fv;
      cz[i] = zeta(t);
      czz[i] = zeta(t) * fv;
    }

    const std::uint64_t seed_n = mix_seed(seed, 0x6000u + ni);
    auto block = [&](std::uint64_t lo, std::uint64_t hi) {
      stats::ComplexAccumulator acc;
      for (std::uint64_t r = lo; r < hi; ++r) {
        Rng rng = Rng::derive(seed_n, r);
        double a_e = 0.0, o_e = 0.0, a_z = 0.0, o_z = 0.0;
        for (std::int64_t i = 0; i < steps; ++i) {
          const double db = sqrt_h * rng.gaussian();
          a_e += ce[i] * db;
          o_e += cez[i] * db;
          a_z += cz[i] * db;
          o_z += czz[i] * db;
        }
        const auto ee = std::exp(std::complex<double>(0.0, a_e));
        const auto een = std::exp(std::complex<double>(0.0, a_e + inv_n * o_e));
        const auto ez = std::exp(std::complex<double>(0.0, a_z));
        const auto ezn = std::exp(std::complex<double>(0.0, a_z + inv_n * o_z));
        acc.add(n2 * (een - ee) * (ezn - ez));
      }
      return acc;
    };
    auto acc = block_reduce<stats::ComplexAccumulator>(
        replications, kRepBlock, block,
        [](const stats::ComplexAccumulator& a,
           const stats::ComplexAccumulator& b) { return a.merged(b); },
        {});
    QuadraticFormRow row;
    row.n = n;
    row.estimate = stats::finalize(acc);
    row.target = target;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace gradlim::paths
