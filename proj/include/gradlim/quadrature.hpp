#ifndef GRADLIM_QUADRATURE_HPP
#define GRADLIM_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace gradlim::quad {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(
    int n) {
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  return {x, w};
}

/// Composite 32-point Gauss-Legendre over [a, b].
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, int panels = 16) {
  static const auto gl = gauss_legendre(32);
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < gl.first.size(); ++i)
      s += gl.second[i] * f(mid + 0.5 * h * gl.first[i]);
    total += 0.5 * h * s;
  }
  return total;
}

/// E[f(Y)] for Y ~ N(0,1), by quadrature against the density.
inline double expect_std_normal(const std::function<double(double)>& f) {
  return integrate(
      [&](double x) {
        return f(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
      },
      -12.0, 12.0, 48);
}

}  // namespace gradlim::quad

#endif
