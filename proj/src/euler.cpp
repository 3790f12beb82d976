#include "gradlim/euler.hpp"

#include <cmath>
#include <stdexcept>

#include "gradlim/parallel.hpp"
#include "gradlim/rng.hpp"

namespace gradlim::euler {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = salt;
  return a ^ splitmix64(s);
}

const double kInvSqrt12 = 1.0 / std::sqrt(12.0);

void check_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("euler: non-finite ") + what);
}

}  // namespace

MechanicalSDE constant_sde(double f11, Eigen::Vector2d x0) {
  MechanicalSDE sde;
  sde.name = "constant";
  sde.f11 = [f11](double) { return f11; };
  sde.d_f11 = [](double) { return 0.0; };
  sde.f12 = [](double, double) { return 0.0; };
  sde.d1_f12 = sde.d2_f12 = [](double, double) { return 0.0; };
  sde.f22 = [](double, double) { return 0.0; };
  sde.d1_f22 = sde.d2_f22 = [](double, double) { return 0.0; };
  sde.x0 = x0;
  return sde;
}

MechanicalSDE linear_sde(Eigen::Vector2d x0) {
  MechanicalSDE sde;
  sde.name = "linear";
  sde.f11 = [](double x2) { return x2; };
  sde.d_f11 = [](double) { return 1.0; };
  sde.f12 = [](double, double) { return 0.0; };
  sde.d1_f12 = sde.d2_f12 = [](double, double) { return 0.0; };
  sde.f22 = [](double x1, double) { return x1; };
  sde.d1_f22 = [](double, double) { return 1.0; };
  sde.d2_f22 = [](double, double) { return 0.0; };
  sde.x0 = x0;
  return sde;
}

MechanicalSDE sine_mechanical_sde() {
  MechanicalSDE sde;
  sde.name = "sine_mechanical";
  sde.f11 = [](double x2) { return std::sin(x2); };
  sde.d_f11 = [](double x2) { return std::cos(x2); };
  sde.f12 = [](double, double) { return 0.0; };
  sde.d1_f12 = sde.d2_f12 = [](double, double) { return 0.0; };
  sde.f22 = [](double x1, double) { return x1; };
  sde.d1_f22 = [](double, double) { return 1.0; };
  sde.d2_f22 = [](double, double) { return 0.0; };
  sde.x0 = {0.5, 0.5};
  return sde;
}

PairPath euler_solve(const MechanicalSDE& sde,
                     const paths::SamplePath& brownian) {
  const std::int64_t n = brownian.steps();
  const double dt = brownian.horizon / static_cast<double>(n);
  PairPath out;
  out.horizon = brownian.horizon;
  out.x1.resize(n + 1);
  out.x2.resize(n + 1);
  out.x1[0] = sde.x0[0];
  out.x2[0] = sde.x0[1];
  for (std::int64_t k = 0; k < n; ++k) {
    const double x1 = out.x1[k], x2 = out.x2[k];
    const double a = sde.f11(x2);
    const double b = sde.f12(x1, x2);
    const double c = sde.f22(x1, x2);
    check_finite(a, "f11");
    check_finite(b, "f12");
    check_finite(c, "f22");
    const double db = brownian.values[k + 1] - brownian.values[k];
    out.x1[k + 1] = x1 + a * db + b * dt;
    out.x2[k + 1] = x2 + c * dt;
  }
  return out;
}

PairPath reference_solve(const MechanicalSDE& sde,
                         const paths::SamplePath& fine_brownian,
                         std::int64_t coarse_steps) {
  const std::int64_t fine = fine_brownian.steps();
  if (fine % coarse_steps != 0 || fine / coarse_steps < 64)
    throw std::invalid_argument(
        "reference_solve: fine grid must be >= 64x the coarse grid");
  const PairPath full = euler_solve(sde, fine_brownian);
  const std::int64_t stride = fine / coarse_steps;
  PairPath out;
  out.horizon = fine_brownian.horizon;
  out.x1.resize(coarse_steps + 1);
  out.x2.resize(coarse_steps + 1);
  for (std::int64_t k = 0; k <= coarse_steps; ++k) {
    out.x1[k] = full.x1[k * stride];
    out.x2[k] = full.x2[k * stride];
  }
  return out;
}

double ErrorLimitDrivers::dz12(std::int64_t i) const {
  return kInvSqrt12 * (w.values[i + 1] - w.values[i]) +
         0.5 * (b.values[i + 1] - b.values[i]);
}
double ErrorLimitDrivers::dz21(std::int64_t i) const {
  return -kInvSqrt12 * (w.values[i + 1] - w.values[i]) +
         0.5 * (b.values[i + 1] - b.values[i]);
}
double ErrorLimitDrivers::dz22() const { return 0.5 * b.step(); }

PairPath simulate_error_limit(const MechanicalSDE& sde, const PairPath& x_ref,
                              const ErrorLimitDrivers& drivers) {
  const std::int64_t n = x_ref.steps();
  if (drivers.b.steps() != n || drivers.w.steps() != n)
    throw std::invalid_argument("simulate_error_limit: grid mismatch");
  const double dt = x_ref.horizon / static_cast<double>(n);
  PairPath u;
  u.horizon = x_ref.horizon;
  u.x1 = Eigen::ArrayXd::Zero(n + 1);
  u.x2 = Eigen::ArrayXd::Zero(n + 1);
  const double dz22 = drivers.dz22();
  for (std::int64_t k = 0; k < n; ++k) {
    const double x1 = x_ref.x1[k], x2 = x_ref.x2[k];
    const double db = drivers.b.values[k + 1] - drivers.b.values[k];
    const double dz12 = drivers.dz12(k);
    const double dz21 = drivers.dz21(k);

    const double f11 = sde.f11(x2), df11 = sde.d_f11(x2);
    const double f12 = sde.f12(x1, x2), f22 = sde.f22(x1, x2);
    const double d1f12 = sde.d1_f12(x1, x2), d2f12 = sde.d2_f12(x1, x2);
    const double d1f22 = sde.d1_f22(x1, x2), d2f22 = sde.d2_f22(x1, x2);

    const double u1 = u.x1[k], u2 = u.x2[k];
    // transport along the linearized flow ...
    double du1 = df11 * u2 * db + (d1f12 * u1 + d2f12 * u2) * dt;
    double du2 = (d1f22 * u1 + d2f22 * u2) * dt;
    // ... minus the discretization forcing through the Z block
    du1 -= df11 * f22 * dz21;
    du1 -= d1f12 * (f11 * dz12 + f12 * dz22);
    du1 -= d2f12 * f22 * dz22;
    du2 -= d1f22 * (f11 * dz12 + f12 * dz22);
    du2 -= d2f22 * f22 * dz22;

    u.x1[k + 1] = u1 + du1;
    u.x2[k + 1] = u2 + du2;
  }
  return u;
}

ErrorCompareReport error_distribution_compare(const MechanicalSDE& sde,
                                              const std::vector<int>& n_list,
                                              std::uint64_t replications,
                                              std::uint64_t seed, int refine,
                                              double ks_level) {
  ErrorCompareReport report;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    const std::int64_t fine_steps = static_cast<std::int64_t>(n) * refine;
    const std::uint64_t seed_n = mix_seed(seed, 0x9000u + ni);

    // columns: lhs1, lhs2, rhs1, rhs2, B_1
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(replications), 5);
    auto block = [&](std::uint64_t lo, std::uint64_t hi) {
      for (std::uint64_t r = lo; r < hi; ++r) {
        Rng rng = Rng::derive(seed_n, r);
        const paths::SamplePath fine_b =
            paths::simulate_brownian(1.0, fine_steps, rng);

        // coarse restriction of the same Brownian path
        paths::SamplePath coarse_b;
        coarse_b.horizon = 1.0;
        coarse_b.values.resize(n + 1);
        for (int k = 0; k <= n; ++k)
          coarse_b.values[k] = fine_b.values[static_cast<std::int64_t>(k) *
                                             refine];

        const PairPath coarse = euler_solve(sde, coarse_b);
        const PairPath ref_fine = euler_solve(sde, fine_b);
        const double lhs1 = n * (coarse.x1[n] - ref_fine.x1[fine_steps]);
        const double lhs2 = n * (coarse.x2[n] - ref_fine.x2[fine_steps]);

        // fresh W per replication, never reused across n
        ErrorLimitDrivers drivers;
        drivers.b = fine_b;
        drivers.w = paths::simulate_brownian(1.0, fine_steps, rng);
        const PairPath u = simulate_error_limit(sde, ref_fine, drivers);

        const auto row = static_cast<Eigen::Index>(r);
        rows(row, 0) = lhs1;
        rows(row, 1) = lhs2;
        rows(row, 2) = u.x1[fine_steps];
        rows(row, 3) = u.x2[fine_steps];
        rows(row, 4) = fine_b.values[fine_steps];
      }
      return 0;
    };
    block_reduce<int>(replications, 64, block, [](int, int) { return 0; }, 0);

    ErrorCompareRow row;
    row.n = n;
    row.lhs = stats::mc_moments(rows.leftCols(2));
    row.rhs = stats::mc_moments(rows.middleCols(2, 2));
    const auto all = stats::mc_moments(rows);
    for (int c = 0; c < 2; ++c) {
      row.lhs_cov_with_b[c] = all.covariance(c, 4);
      row.rhs_cov_with_b[c] = all.covariance(c + 2, 4);
      row.cov_stderr[c] = std::hypot(all.covariance_stderr(c, 4),
                                     all.covariance_stderr(c + 2, 4));
    }
    for (int c = 0; c < 2; ++c) {
      std::vector<double> a(rows.col(c).data(),
                            rows.col(c).data() + rows.rows());
      std::vector<double> b(rows.col(c + 2).data(),
                            rows.col(c + 2).data() + rows.rows());
      row.ks_two_sample.push_back(
          stats::ks_test_two_sample(std::move(a), std::move(b), ks_level));
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace gradlim::euler
