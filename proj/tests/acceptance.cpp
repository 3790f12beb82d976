// Acceptance gate: one line per criterion, nonzero exit iff any fails.
// argv[1] (optional) is the path to the CLI binary, used by the
// reproducibility criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gradlim/experiments.hpp"
#include "gradlim/graduation.hpp"
#include "gradlim/measures.hpp"
#include "gradlim/paths.hpp"
#include "gradlim/rng.hpp"

using namespace gradlim;

namespace {

int g_failures = 0;

void line(int idx, bool ok, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", idx, ok ? "PASS" : "FAIL",
              what.c_str());
  if (!ok) ++g_failures;
}

// all explicit-target criteria demand conclusive passes
bool clean(const report::ExperimentReport& rep) {
  return rep.count(stats::Verdict::fail) == 0 &&
         rep.count(stats::Verdict::inconclusive) == 0;
}

const report::Check* find_check(const report::ExperimentReport& rep,
                                const std::string& name) {
  for (const auto& c : rep.checks)
    if (c.name == name) return &c;
  return nullptr;
}

experiments::ExperimentConfig cfg_for(const std::string& experiment) {
  experiments::ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.seed = 7;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();

  // 1: exact theta identity and closed-form moments
  {
    bool ok = true;
    Rng rng(7);
    for (int n : {1, 7, 64, 1000})
      for (int i = 0; i < 10000; ++i) {
        const double y = -4.0 + 8.0 * rng.uniform();
        const double se =
            graduation::scaled_error1(y, graduation::GradMode::nearest, n);
        ok = ok && std::abs(se - graduation::theta(n * y)) <= 1e-12;
      }
    const auto theta = paths::theta_fn();
    ok = ok && theta.mean == 0.0 && theta.l2sq == 1.0 / 12.0;
    line(1, ok, "nearest identity n(Y_n-Y) = theta(nY) to 1e-12; exact "
                "theta moments");
  }

  // 2: uniformity and asymptotic independence of the scaled error
  {
    const auto rep = experiments::run_uniformity(cfg_for("uniformity"));
    line(2, clean(rep),
         "KS of 1/2+theta(nY) vs uniform, decorrelation, joint character");
  }

  // 3: quadratic error constants 1/12 and (1/12)(1+e^-2)/2
  {
    const auto rep = experiments::run_gamma(cfg_for("gamma"));
    bool ok = clean(rep);
    const auto* sin_check = find_check(rep, "gamma_sin");
    const double expected = (1.0 + std::exp(-2.0)) / 24.0;
    ok = ok && sin_check && std::abs(sin_check->target - expected) < 1e-6;
    line(3, ok, "n^2 E[(Y_n-Y)^2 phi'^2-type limits at 1/12 and 0.04733");
  }

  // 4: Rajchman dichotomy on normal / Cantor(1/3) / Cantor(0.4)
  {
    const auto rep = experiments::run_rajchman(cfg_for("rajchman"));
    line(4, clean(rep),
         "decay verdicts with the Cantor plateau and Pisot agreement");
  }

  // 5: second-order bias operators under centered rounding
  {
    const auto rep = experiments::run_bias(cfg_for("bias"));
    bool ok = clean(rep);
    const auto* a_bar = find_check(rep, "a_bar");
    const auto* a_tilde = find_check(rep, "a_tilde");
    const double bar_expected = -(1.0 - std::exp(-2.0)) / 48.0;
    const double tilde_expected = -(1.0 + std::exp(-2.0)) / 48.0;
    ok = ok && a_bar && std::abs(a_bar->target - bar_expected) < 2e-4;
    ok = ok && a_tilde && std::abs(a_tilde->target - tilde_expected) < 2e-4;
    line(5, ok, "a_bar -> -(1-e^-2)/48, score-corrected a_tilde -> "
                "-(1+e^-2)/48, fourth-moment locality");
  }

  // 6: first-order shift bias under one-sided rounding
  {
    auto cfg = cfg_for("bias");
    cfg.scheme = "default";
    cfg.chi = "one";
    const auto rep = experiments::run_bias(cfg);
    bool ok = clean(rep);
    const auto* a_bar = find_check(rep, "a_bar");
    ok = ok && a_bar &&
         std::abs(a_bar->target + 0.5 * std::exp(-0.5)) < 2e-4;
    ok = ok && find_check(rep, "a_bar_excess_negated") != nullptr;
    line(6, ok, "a_bar -> -e^{-1/2}/2, a_tilde -> 0, excess mode negated");
  }

  // 7: change of measure leaves the square-field form alone
  {
    const auto rep =
        experiments::run_change_of_measure(cfg_for("change_of_measure"));
    line(7, clean(rep),
         "weighted gamma matches the reweighted target; identity target is "
         "1/12 for any h");
  }

  // 8: dyadic truncation with the 4^n scaling
  {
    auto cfg = cfg_for("gamma");
    cfg.scheme = "dyadic";
    const auto rep = experiments::run_gamma(cfg);
    bool ok = clean(rep);
    // brute-force Riemann oracle at n = 6 against the same MC estimator
    const int n = 6;
    const double pow2n = 64.0;
    const auto phi = fns::sin_2pi();
    const long grid = 200000;
    double oracle = 0.0;
    for (long i = 0; i < grid; ++i) {
      const double y = (i + 0.5) / static_cast<double>(grid);
      const double frac = y * pow2n - std::floor(y * pow2n);
      const double yn = y - 0.5 * frac / pow2n;
      const double d = phi.value1(yn) - phi.value1(y);
      oracle += 4096.0 * d * d;
    }
    oracle /= static_cast<double>(grid);
    const auto mc = graduation::estimate_gamma(
        measures::uniform_law(), phi, graduation::dyadic_scheme(), {n},
        400000, 7);
    ok = ok && std::abs(mc.points[0].estimate.value - oracle) <=
                   3.0 * mc.points[0].estimate.stderr_;
    line(8, ok, "4^n-scaled dyadic quadratic error at (1/12) E[phi'^2], "
                "pinned by the summation oracle");
  }

  // 9: oscillatory Wiener integral limit
  {
    const auto rep = experiments::run_rootzen(cfg_for("rootzen"));
    line(9, clean(rep),
         "terminal variance 1/12, Gaussian limit law, vanishing covariance "
         "with B");
  }

  // 10: joint Gaussian limit and telescoping of the Euler error integrals
  {
    const auto rep = experiments::run_eq19(cfg_for("eq19"));
    line(10, clean(rep),
         "covariance [[1/3,1/6,1/2],[1/6,1/3,1/2],[1/2,1/2,1]] and "
         "telescoping MAE < 0.02 decreasing in K");
  }

  // 11: n^2 quadratic form of perturbed Wiener exponentials
  {
    const auto rep =
        experiments::run_quadratic_form(cfg_for("quadratic_form"));
    bool ok = clean(rep);
    const auto* re = find_check(rep, "quadratic_form_re");
    ok = ok && re && std::abs(re->target + std::exp(-2.0) / 12.0) < 1e-9;
    line(11, ok, "real part -> -e^-2/12, imaginary part -> 0");
  }

  // 12: distributional match of the n-scaled Euler error with the limit
  {
    const auto rep = experiments::run_euler_error(cfg_for("euler_error"));
    line(12, clean(rep),
         "constant system exact, sine-mechanical moments + KS match, driver "
         "identities");
  }

  // 13: byte-identical reruns of the full suite through the CLI
  {
    bool ok = false;
    std::string what = "run all --seed 7 twice, byte-identical reports";
    if (argc > 1) {
      const std::string cli = argv[1];
      const std::string cmd1 =
          "\"" + cli + "\" run all --seed 7 --out acceptance_run1.json";
      const std::string cmd2 = "GRADLIM_THREADS=3 \"" + cli +
                               "\" run all --seed 7 --out acceptance_run2.json";
      const int s1 = std::system(cmd1.c_str());
      const int s2 = std::system(cmd2.c_str());
      const std::string r1 = slurp("acceptance_run1.json");
      const std::string r2 = slurp("acceptance_run2.json");
      ok = s1 == 0 && s2 == 0 && !r1.empty() && r1 == r2;
    } else {
      what += " (no CLI path given)";
    }
    line(13, ok, what);
  }

  const auto dt = std::chrono::duration_cast<std::chrono::seconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  std::printf("total: %d failure(s), %llds\n", g_failures,
              static_cast<long long>(dt));
  return g_failures == 0 ? 0 : 1;
}
