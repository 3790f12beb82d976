#include "gradlim/test_function.hpp"

#include <cmath>
#include <numbers>

namespace gradlim {

TestFunction make_scalar_fn(std::string name, std::function<double(double)> f,
                            std::function<double(double)> df,
                            std::function<double(double)> d2f,
                            std::optional<double> lip) {
  TestFunction t;
  t.dim = 1;
  t.name = std::move(name);
  t.value = [f](const Eigen::VectorXd& x) { return f(x[0]); };
  t.grad = [df](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> g) {
    g[0] = df(x[0]);
  };
  if (d2f)
    t.laplacian = [d2f](const Eigen::VectorXd& x) { return d2f(x[0]); };
  t.lip_bound = lip;
  return t;
}

namespace fns {

TestFunction identity() {
  return make_scalar_fn(
      "identity", [](double x) { return x; }, [](double) { return 1.0; },
      [](double) { return 0.0; }, 1.0);
}

TestFunction one() {
  return make_scalar_fn(
      "one", [](double) { return 1.0; }, [](double) { return 0.0; },
      [](double) { return 0.0; }, 0.0);
}

TestFunction sine() {
  return make_scalar_fn(
      "sin", [](double x) { return std::sin(x); },
      [](double x) { return std::cos(x); },
      [](double x) { return -std::sin(x); }, 1.0);
}

TestFunction cosine() {
  return make_scalar_fn(
      "cos", [](double x) { return std::cos(x); },
      [](double x) { return -std::sin(x); },
      [](double x) { return -std::cos(x); }, 1.0);
}

TestFunction sin_2pi() {
  constexpr double w = 2.0 * std::numbers::pi;
  return make_scalar_fn(
      "sin_2pi", [](double x) { return std::sin(w * x); },
      [](double x) { return w * std::cos(w * x); },
      [](double x) { return -w * w * std::sin(w * x); }, w);
}

TestFunction squared(const TestFunction& phi) {
  TestFunction t;
  t.dim = phi.dim;
  t.name = phi.name + "^2";
  auto base = phi;
  t.value = [base](const Eigen::VectorXd& x) {
    const double v = base.value(x);
    return v * v;
  };
  t.grad = [base](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> g) {
    base.grad(x, g);
    g *= 2.0 * base.value(x);
  };
  if (base.laplacian) {
    t.laplacian = [base](const Eigen::VectorXd& x) {
      Eigen::VectorXd g(x.size());
      base.grad(x, g);
      return 2.0 * base.value(x) * base.laplacian(x) + 2.0 * g.squaredNorm();
    };
  }
  return t;
}

TestFunction product(const TestFunction& phi, const TestFunction& chi) {
  TestFunction t;
  t.dim = phi.dim;
  t.name = phi.name + "*" + chi.name;
  auto a = phi;
  auto b = chi;
  t.value = [a, b](const Eigen::VectorXd& x) {
    return a.value(x) * b.value(x);
  };
  t.grad = [a, b](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> g) {
    Eigen::VectorXd ga(x.size()), gb(x.size());
    a.grad(x, ga);
    b.grad(x, gb);
    g = a.value(x) * gb + b.value(x) * ga;
  };
  if (a.laplacian && b.laplacian) {
    t.laplacian = [a, b](const Eigen::VectorXd& x) {
      Eigen::VectorXd ga(x.size()), gb(x.size());
      a.grad(x, ga);
      b.grad(x, gb);
      return a.value(x) * b.laplacian(x) + b.value(x) * a.laplacian(x) +
             2.0 * ga.dot(gb);
    };
  }
  return t;
}

}  // namespace fns
}  // namespace gradlim
