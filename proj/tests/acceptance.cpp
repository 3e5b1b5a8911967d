// Acceptance suite: one pass/fail line per criterion, exit status = number of
// failed criteria. Run all criteria with no arguments or a single one with
// --criterion N.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "ogsg/models.hpp"
#include "ogsg/montecarlo.hpp"
#include "ogsg/numerics.hpp"
#include "ogsg/rng.hpp"
#include "ogsg/transforms.hpp"
#include "ogsg/variational.hpp"
#include "oracles.hpp"

using namespace ogsg;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

struct Family {
  std::string label;
  ModelSpec spec;
  double beta_cap;  // upper end of the in-domain test grid
};

std::vector<Family> closed_form_families() {
  std::vector<Family> fams;
  fams.push_back({"sk", ModelSpec::sk(), 0.45});
  for (double p : {0.3, 0.5, 0.7}) {
    fams.push_back({"rom(" + std::to_string(p).substr(0, 3) + ")",
                    ModelSpec::rom(p), 0.45});
  }
  for (double l : {1.5, 2.0, 4.0}) {
    fams.push_back({"hopfield(" + std::to_string(l).substr(0, 3) + ")",
                    ModelSpec::hopfield(l),
                    0.45 / (1.0 + std::sqrt(l))});
  }
  return fams;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  bool all = true;
  double worst = 0.0;
  for (const auto& fam : closed_form_families()) {
    TransformProfile numeric(limiting_measure(fam.spec), RMode::NumericInversion);
    for (int i = 1; i <= 10; ++i) {
      double beta = fam.beta_cap * i / 10.0;
      double closed = closed_form_limit(fam.spec, beta).value();
      double viaH = free_energy_limit(numeric, beta);
      worst = std::max(worst, std::abs(closed - viaH));
      all = all && std::abs(closed - viaH) < 1e-8;
    }
  }
  report(1, all,
         fmt("closed form vs numeric H-inversion on 10-point grids, worst |diff| = %.2e "
             "(tol 1e-8)",
             worst));
}

void criterion_2() {
  auto est = quenched_free_energy(ModelSpec::sk(), 20, 0.3, 50, 2024);
  bool ok = std::abs(est.mean - 0.09) < 0.03 && est.std_err < 0.01;
  report(2, ok,
         fmt("sk quenched n=20 beta=0.3: mean = %.5f (target 0.09 +/- 0.03), "
             "std_err = %.5f (< 0.01)",
             est.mean, est.std_err));
}

void criterion_3() {
  // target from the quadrature oracle over the closed-form R
  TransformProfile tp(SpectralMeasure::two_point(0.5));
  auto r = [&](double v) { return r_transform(tp, v); };
  double target = 0.5 * oracles::romberg(r, 0.0, 0.6, 1e-13);
  auto est = quenched_free_energy(ModelSpec::rom(0.5), 20, 0.3, 50, 2024);
  bool ok = std::abs(est.mean - target) < 0.03;
  report(3, ok,
         fmt("rom(0.5) quenched n=20 beta=0.3: mean = %.5f vs quadrature target %.5f "
             "(tol 0.03)",
             est.mean, target));
}

void criterion_4() {
  struct Case {
    std::string label;
    SpectralMeasure measure;
    double beta;
    double target;
  };
  const std::vector<Case> cases = {
      {"sk beta=0.3", SpectralMeasure::semicircle(), 0.3, 0.09},
      {"rom(0.5) beta=0.3", SpectralMeasure::two_point(0.5), 0.3,
       closed_form_limit(ModelSpec::rom(0.5), 0.3).value()},
      {"hopfield(2) beta=0.15", SpectralMeasure::marchenko_pastur(2.0), 0.15,
       closed_form_limit(ModelSpec::hopfield(2.0), 0.15).value()},
  };
  bool all = true;
  std::string detail = "gaussian-ratio first moment at n=2000, 1e5 samples:";
  for (const auto& c : cases) {
    auto est = annealed_moments(c.measure, 2000, c.beta, 100000, 77);
    bool ok = std::abs(est.log_first_moment_rate - c.target) < 0.01;
    all = all && ok;
    detail += " " + c.label + fmt(" |%.4f-%.4f|", est.log_first_moment_rate, c.target);
  }
  report(4, all, detail + " (tol 0.01)");
}

void criterion_5() {
  struct Case {
    std::string label;
    SpectralMeasure measure;
    double beta;
  };
  const std::vector<Case> cases = {
      {"sk beta=0.3", SpectralMeasure::semicircle(), 0.3},
      {"rom(0.5) beta=0.25", SpectralMeasure::two_point(0.5), 0.25},
  };
  bool all = true;
  std::string detail = "second-moment gap:";
  for (const auto& c : cases) {
    auto big = annealed_moments(c.measure, 2000, c.beta, 100000, 78);
    auto small = annealed_moments(c.measure, 500, c.beta, 100000, 78);
    double gap_big =
        std::abs(big.log_second_moment_rate - big.log_first_moment_rate);
    double gap_small =
        std::abs(small.log_second_moment_rate - small.log_first_moment_rate);
    bool ok = gap_big < 0.01 && gap_big < gap_small;
    all = all && ok;
    detail += " " + c.label + fmt(" n2000=%.2e n500=%.2e", gap_big, gap_small);
  }
  report(5, all, detail + " (n=2000 gap < 0.01 and below n=500 gap)");
}

void criterion_6() {
  bool all = true;
  double worst_id = 0.0, worst_sup = 0.0;
  for (const auto& fam : closed_form_families()) {
    TransformProfile profile(limiting_measure(fam.spec));
    RateFunction rf{TransformProfile(limiting_measure(fam.spec))};
    for (int i = 1; i <= 5; ++i) {
      double beta = fam.beta_cap * i / 5.0;
      double a = r_transform(profile, 2.0 * beta);
      double identity = beta * a - rate_function(rf, a) -
                        free_energy_limit(profile, beta);
      worst_id = std::max(worst_id, std::abs(identity));
      all = all && std::abs(identity) < 1e-8;
    }
    for (int i = 1; i <= 3; ++i) {
      double beta = fam.beta_cap * i / 3.0;
      bool verified = false;
      try {
        verified = condition_c_margin(fam.spec, beta) > 0.0;
      } catch (const DomainError&) {
        verified = false;  // window leaves the domain of R: not certified
      }
      if (!verified) continue;
      auto sol = maximize_psi(rf, beta);
      double twoi = 2.0 * free_energy_limit(profile, beta);
      worst_sup = std::max(worst_sup, std::abs(sol.psi_value - twoi));
      all = all && std::abs(sol.psi_value - twoi) < 1e-6;
    }
  }
  report(6, all,
         fmt("variational identity worst |beta a - T(a) - I| = %.2e (tol 1e-8); "
             "worst |sup psi - 2I| = %.2e (tol 1e-6)",
             worst_id, worst_sup));
}

void criterion_7() {
  RateFunction rf{TransformProfile(SpectralMeasure::semicircle())};
  bool all = true;
  double worst = 0.0;
  for (double beta : {0.1, 0.2, 0.3, 0.4}) {
    auto sol = solve_fixed_point(rf, beta);
    double err = std::max(std::abs(sol.x_star - 2.0 * beta),
                          std::abs(sol.y_star - 2.0 * beta));
    worst = std::max(worst, err);
    all = all && sol.converged && err < 1e-11;
  }
  report(7, all, fmt("sk fixed point (2 beta, 2 beta), worst error = %.2e (tol 1e-11)", worst));
}

void criterion_8() {
  RateFunction rsk{TransformProfile(SpectralMeasure::semicircle())};
  double b_sk = beta_zero(rsk, 0.1, 1.0);
  bool sk_ok = b_sk >= 0.45 && b_sk <= 0.55;
  report(8, sk_ok, fmt("sk symmetry transition on (0.1, 1.0) at beta = %.4f "
                       "(window [0.45, 0.55])", b_sk));

  RateFunction rrom{TransformProfile(SpectralMeasure::two_point(0.5))};
  bool rom_ok = false;
  std::string detail;
  try {
    double b_rom = beta_zero(rrom, 0.5, 4.0);
    rom_ok = b_rom >= 2.5 && b_rom <= 2.9;
    detail = fmt("rom(0.5) transition on (0.5, 4.0) at beta = %.4f (window [2.5, 2.9])",
                 b_rom);
  } catch (const NoTransitionError&) {
    // The maximizer is diagonal across the whole interval; measure the actual
    // transition further out for context. See the analysis notes: the
    // [2.5, 2.9] window is not attainable from the stated rate function.
    double actual = beta_zero(rrom, 4.0, 7.0);
    detail = fmt("rom(0.5): predicate diagonal on all of (0.5, 4.0); no transition "
                 "in the interval (actual transition at beta = %.4f, expected window "
                 "[2.5, 2.9] unattainable)",
                 actual);
  }
  report(8, rom_ok, detail);
}

void criterion_9() {
  bool gray_ok = true;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    int n = 6 + static_cast<int>(seed % 5);
    Rng rng(900 + seed);
    std::vector<double> d(static_cast<std::size_t>(n));
    for (double& x : d) x = rng.gaussian();
    auto o = sample_haar(n, 950 + seed);
    double diff = std::abs(exact_log_partition(d, o.matrix, 0.35) -
                           oracles::naive_log_partition(d, o.matrix, 0.35));
    worst = std::max(worst, diff);
    gray_ok = gray_ok && diff < 1e-12;
  }
  report(9, gray_ok,
         fmt("gray-code vs naive enumeration over 20 instances, worst |diff| = %.2e "
             "(tol 1e-12)", worst));

  const int n = 6;
  auto lambdas = SpectralMeasure::semicircle().quantile_grid(n);
  auto est = annealed_moments(lambdas, 0.3, 20000, 17);
  const int draws = 10000;
  num::LogSumAcc acc, acc2;
  for (int k = 0; k < draws; ++k) {
    auto o = sample_haar(n, 5000 + k);
    double phi = exact_log_partition(lambdas, o.matrix, 0.3);
    acc.add(n * phi);
    acc2.add(2.0 * n * phi);
  }
  double log_mean = acc.log_total() - std::log(double(draws));
  double haar_rate = log_mean / n;
  double ratio = std::exp(acc2.log_total() - std::log(double(draws)) - 2.0 * log_mean);
  double haar_se = std::sqrt(std::max(ratio - 1.0, 0.0) / draws) / n;
  double tol = 3.0 * (est.std_err_first + haar_se);
  bool mc_ok = std::abs(est.log_first_moment_rate - haar_rate) < tol;
  report(9, mc_ok,
         fmt("gaussian-ratio vs haar average at n=6: |%.5f - %.5f| within 3 combined "
             "std errs", est.log_first_moment_rate, haar_rate));
}

void criterion_10() {
  bool grad_ok = true;
  double worst = 0.0;
  for (const auto& fam : {Family{"sk", ModelSpec::sk(), 0.45},
                          Family{"rom", ModelSpec::rom(0.5), 0.45},
                          Family{"hop", ModelSpec::hopfield(2.0),
                                 0.45 / (1.0 + std::sqrt(2.0))}}) {
    RateFunction rf{TransformProfile(limiting_measure(fam.spec))};
    const auto& p = rf.profile();
    double beta = 0.8 * fam.beta_cap;
    double span = p.x_max() - p.x_min();
    for (int k = 0; k < 100; ++k) {
      double x = p.x_min() + span * (0.05 + 0.9 * oracles::kronecker(k));
      double y = p.x_min() + span * (0.05 + 0.9 * oracles::kronecker(k + 307));
      double gx = beta + beta * std::tanh(beta * (x - y)) - rate_derivative(rf, x);
      auto fx = [&](double u) { return psi(rf, beta, u, y); };
      double fd = oracles::central_diff(fx, x, 1e-6 * std::max(1.0, std::abs(x)));
      worst = std::max(worst, std::abs(gx - fd));
      grad_ok = grad_ok && std::abs(gx - fd) < 1e-6;
    }
  }
  report(10, grad_ok,
         fmt("analytic gradient vs central differences at 100 points per family, "
             "worst |diff| = %.2e (tol 1e-6)", worst));

  bool hess_ok = true;
  for (const auto& fam : closed_form_families()) {
    RateFunction rf{TransformProfile(limiting_measure(fam.spec))};
    const auto& p = rf.profile();
    for (int i = 1; i <= 6; ++i) {
      double beta = fam.beta_cap * i / 6.0;
      if (beta * beta * r_prime(p, 2.0 * beta) < 0.25) {
        auto sol = solve_fixed_point(rf, beta);
        hess_ok = hess_ok && sol.classification == Classification::LocalMax;
      }
    }
  }
  report(10, hess_ok,
         "hessian negative definite at the symmetric point whenever beta^2 R'(2 beta) < 1/4");
}

void criterion_11() {
  bool all = true;
  std::string detail = "phi std across haar draws, n=10 vs n=20 at 3 sigma:";
  for (const auto& fam :
       {Family{"sk", ModelSpec::sk(), 0.0}, Family{"rom", ModelSpec::rom(0.5), 0.0},
        Family{"hop", ModelSpec::hopfield(2.0), 0.0}}) {
    auto rows = concentration_scan(fam.spec, 0.3, {10, 20}, 250, 4242);
    double margin = rows[0].std_dev - rows[1].std_dev;
    double se = 3.0 * std::sqrt(rows[0].std_err_of_std * rows[0].std_err_of_std +
                                rows[1].std_err_of_std * rows[1].std_err_of_std);
    bool ok = margin > se;
    all = all && ok;
    detail += " " + fam.label + fmt(" (drop %.4f > %.4f)", margin, se);
  }
  report(11, all, detail);
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);
  }
  void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                          criterion_5, criterion_6, criterion_7, criterion_8,
                          criterion_9, criterion_10, criterion_11};
  if (only >= 1 && only <= 11) {
    criteria[only - 1]();
  } else {
    for (auto* fn : criteria) fn();
    std::printf("%s: %d criterion check(s) failed\n",
                g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                g_failures);
  }
  return g_failures;
}
