#include <doctest.h>

#include <cmath>
#include <vector>

#include "ogsg/measures.hpp"
#include "ogsg/transforms.hpp"
#include "oracles.hpp"

using namespace ogsg;

namespace {

SpectralMeasure four_atoms() {
  return SpectralMeasure::discrete(
      {{-1.5, 0.2}, {-0.25, 0.3}, {0.5, 0.3}, {1.25, 0.2}});
}

std::vector<SpectralMeasure> all_families() {
  return {SpectralMeasure::semicircle(), SpectralMeasure::two_point(0.5),
          SpectralMeasure::marchenko_pastur(2.0), four_atoms()};
}

}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("measure construction and invariants") {
  CHECK_THROWS_AS(SpectralMeasure::two_point(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralMeasure::marchenko_pastur(1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralMeasure::discrete({{0.0, 0.5}, {1.0, 0.4}}),
                  std::invalid_argument);  // weights must sum to 1
  CHECK_THROWS_AS(SpectralMeasure::discrete({{0.0, 1.0}, {1.0, -0.0}}),
                  std::invalid_argument);

  auto m = SpectralMeasure::discrete({{1.0, 0.5}, {-1.0, 0.5}});
  CHECK(m.atoms().front().location == -1.0);  // sorted ascending
  CHECK(m.lambda_min() == -1.0);
  CHECK(m.lambda_max() == 1.0);

  auto sc = SpectralMeasure::semicircle();
  CHECK(sc.mean() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sc.variance() == doctest::Approx(1.0));
  CHECK(sc.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
  auto mp = SpectralMeasure::marchenko_pastur(2.0);
  CHECK(mp.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mp.integrate([](double x) { return x; }) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("measure json round trip") {
  for (const auto& m : all_families()) {
    auto j = m.to_json();
    auto back = SpectralMeasure::from_json(j);
    CHECK(back.kind() == m.kind());
    CHECK(back.lambda_min() == doctest::Approx(m.lambda_min()).epsilon(1e-15));
    CHECK(back.mean() == doctest::Approx(m.mean()).epsilon(1e-15));
  }
  CHECK_THROWS_AS(SpectralMeasure::from_json(nlohmann::json{{"kind", "nope"}}),
                  std::invalid_argument);
}

TEST_CASE("hilbert closed forms") {
  TransformProfile sc(SpectralMeasure::semicircle());
  CHECK(hilbert(sc, 3.0) == doctest::Approx(0.5 * (3.0 - std::sqrt(5.0))).epsilon(1e-14));
  CHECK(hilbert(sc, -3.0) == doctest::Approx(-0.5 * (3.0 - std::sqrt(5.0))).epsilon(1e-14));

  TransformProfile tp(SpectralMeasure::two_point(0.5));
  CHECK(hilbert(tp, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  TransformProfile pm(SpectralMeasure::discrete({{0.0, 1.0}}));
  CHECK(hilbert(pm, 1.0) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(hilbert(sc, 1.0), DomainError);
  CHECK_THROWS_AS(hilbert(sc, 2.0), DomainError);  // support inclusive

  // the MP closed form equals the quadrature definition
  TransformProfile mp(SpectralMeasure::marchenko_pastur(2.0));
  for (double z : {-3.0, 0.0, 0.1, 6.5, 10.0}) {
    if (z >= mp.lambda_min() && z <= mp.lambda_max()) continue;
    double direct = mp.measure().integrate(
        [&](double l) { return 1.0 / (z - l); }, 1e-13);
    CHECK(hilbert(mp, z) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("profile edges and ranges") {
  TransformProfile sc(SpectralMeasure::semicircle());
  CHECK(sc.h_max() == doctest::Approx(1.0));
  CHECK(sc.h_min() == doctest::Approx(-1.0));
  CHECK(sc.x_max() == doctest::Approx(1.0));
  CHECK(sc.x_min() == doctest::Approx(-1.0));

  TransformProfile tp(SpectralMeasure::two_point(0.3));
  CHECK(std::isinf(tp.h_max()));
  CHECK(std::isinf(tp.h_min()));
  CHECK(tp.x_max() == doctest::Approx(1.0));
  CHECK(tp.x_min() == doctest::Approx(-1.0));

  double s = std::sqrt(2.0);
  TransformProfile mp(SpectralMeasure::marchenko_pastur(2.0));
  CHECK(mp.h_max() == doctest::Approx(1.0 / (1.0 + s)).epsilon(1e-14));
  CHECK(mp.h_min() == doctest::Approx(1.0 / (1.0 - s)).epsilon(1e-14));
  CHECK(mp.x_max() == doctest::Approx(2.0 + s).epsilon(1e-14));
  CHECK(mp.x_min() == doctest::Approx(2.0 - s).epsilon(1e-14));

  TransformProfile disc(four_atoms());
  CHECK(std::isinf(disc.h_max()));  // atoms at the edges diverge
  CHECK(std::isinf(disc.h_min()));
  for (const auto& m : all_families()) {
    TransformProfile p(m);
    CHECK(p.x_min() < p.mean());
    CHECK(p.mean() < p.x_max());
  }
}

TEST_CASE("r transform closed forms and extension at zero") {
  TransformProfile sc(SpectralMeasure::semicircle());
  CHECK(r_transform(sc, 0.3) == doctest::Approx(0.3).epsilon(1e-15));

  TransformProfile tp(SpectralMeasure::two_point(0.5));
  CHECK(r_transform(tp, 0.5) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));

  TransformProfile mp(SpectralMeasure::marchenko_pastur(2.0));
  CHECK(r_transform(mp, 0.3) == doctest::Approx(2.0 / 0.7).epsilon(1e-14));
  // z = 0.5 lies outside (H_min, H_max) = (1/(1-s), 1/(1+s)); the analytic
  // formula continues past the edge but the transform does not.
  CHECK_THROWS_AS(r_transform(mp, 0.5), DomainError);

  for (const auto& m : all_families()) {
    TransformProfile p(m);
    CHECK(r_transform(p, 0.0) == p.mean());
  }
}

TEST_CASE("numeric inversion matches grid-inversion oracle on atoms") {
  TransformProfile disc(four_atoms());
  auto h = [&](double w) { return hilbert(disc, w); };
  double expected = oracles::grid_inverse_r(h, disc.lambda_max(), 0.2);
  CHECK(r_transform(disc, 0.2) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("q transform inverts r") {
  TransformProfile sc(SpectralMeasure::semicircle());
  CHECK(q_transform(sc, 0.7) == doctest::Approx(0.7).epsilon(1e-15));
  TransformProfile tp(SpectralMeasure::two_point(0.5));
  CHECK(q_transform(tp, std::sqrt(2.0) - 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  for (const auto& m : all_families()) {
    TransformProfile p(m);
    CHECK(q_transform(p, p.mean()) == 0.0);
    CHECK_THROWS_AS(q_transform(p, p.x_max() + 0.5), DomainError);
  }
}

TEST_CASE("k transform inverts hilbert") {
  TransformProfile sc(SpectralMeasure::semicircle());
  CHECK(k_transform(sc, 0.5) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(hilbert(sc, k_transform(sc, 0.5)) == doctest::Approx(0.5).epsilon(1e-12));
  TransformProfile tp(SpectralMeasure::two_point(0.5));
  CHECK(k_transform(tp, 2.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-12));
  // edge consistency: K approaches the support edge as z approaches H_max
  CHECK(std::abs(k_transform(sc, 1.0 - 1e-4) - 2.0) < 1e-6);
  CHECK_THROWS_AS(k_transform(sc, 0.0), DomainError);
}

TEST_CASE("round trips across families") {
  for (const auto& m : all_families()) {
    TransformProfile p(m);
    double zlo = std::isinf(p.h_min()) ? -10.0 : p.h_min() + 1e-6;
    double zhi = std::isinf(p.h_max()) ? 10.0 : p.h_max() - 1e-6;
    for (int k = 0; k < 200; ++k) {
      double z = zlo + (zhi - zlo) * oracles::kronecker(k);
      if (std::abs(z) < 1e-6) continue;
      CHECK(std::abs(hilbert(p, k_transform(p, z)) - z) < 1e-9);
      CHECK(std::abs(q_transform(p, r_transform(p, z)) - z) < 1e-8);
    }
    double span = p.x_max() - p.x_min();
    for (int k = 0; k < 200; ++k) {
      double x = p.x_min() + span * (1e-6 + (1.0 - 2e-6) * oracles::kronecker(k));
      CHECK(std::abs(r_transform(p, q_transform(p, x)) - x) < 1e-9);
    }
  }
}

TEST_CASE("monotonicity of h and r") {
  for (const auto& m : all_families()) {
    TransformProfile p(m);
    double prev = hilbert(p, p.lambda_max() + 1e-6);
    for (int i = 1; i <= 200; ++i) {
      double z = p.lambda_max() + 1e-6 + 10.0 * i / 200.0;
      double h = hilbert(p, z);
      CHECK(h < prev);
      prev = h;
    }
    double zlo = std::isinf(p.h_min()) ? -8.0 : p.h_min() + 1e-3;
    double zhi = std::isinf(p.h_max()) ? 8.0 : p.h_max() - 1e-3;
    double prev_r = r_transform(p, zlo);
    for (int i = 1; i <= 100; ++i) {
      double z = zlo + (zhi - zlo) * i / 100.0;
      double r = r_transform(p, z);
      CHECK(r > prev_r);
      prev_r = r;
    }
  }
}

TEST_CASE("free energy limit closed forms and domain") {
  TransformProfile sc(SpectralMeasure::semicircle());
  CHECK(free_energy_limit(sc, 0.3) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(free_energy_limit(sc, 0.0) == 0.0);
  CHECK_THROWS_AS(free_energy_limit(sc, 0.5), DomainError);
  CHECK_THROWS_AS(free_energy_limit(sc, -0.1), DomainError);

  // two-point closed antiderivative, checked twice: Romberg over the closed
  // form of R, and the frozen value of the analytic expression.
  TransformProfile tp(SpectralMeasure::two_point(0.5));
  double i25 = free_energy_limit(tp, 0.25);
  CHECK(i25 == doctest::Approx(0.056496788978374402).epsilon(1e-12));
  auto r_closed = [&](double v) { return r_transform(tp, v); };
  CHECK(i25 == doctest::Approx(0.5 * oracles::romberg(r_closed, 0.0, 0.5)).epsilon(1e-10));

  TransformProfile mp(SpectralMeasure::marchenko_pastur(2.0));
  CHECK(free_energy_limit(mp, 0.15) ==
        doctest::Approx(std::log(1.0 / 0.7)).epsilon(1e-13));
  // 2 beta = 0.5 exceeds H_max = 1/(1+sqrt(2)) for this family
  CHECK_THROWS_AS(free_energy_limit(mp, 0.25), DomainError);
}

TEST_CASE("free energy limit is nonnegative, nondecreasing, convex") {
  for (const auto& m : all_families()) {
    TransformProfile p(m);
    double cap = std::isinf(p.h_max()) ? 1.0 : 0.45 * p.h_max();
    std::vector<double> vals;
    for (int i = 0; i <= 20; ++i) {
      vals.push_back(free_energy_limit(p, cap * i / 20.0));
    }
    for (double v : vals) CHECK(v >= -1e-12);
    for (std::size_t i = 1; i < vals.size(); ++i) {
      CHECK(vals[i] >= vals[i - 1] - 1e-12);
    }
    for (std::size_t i = 2; i < vals.size(); ++i) {
      CHECK(vals[i] - 2.0 * vals[i - 1] + vals[i - 2] >= -1e-10);
    }
  }
}

TEST_CASE("numeric pipeline on 2000 quantile atoms matches closed forms") {
  struct Case {
    SpectralMeasure family;
    SpectralMeasure reference;
  };
  auto make = [](SpectralMeasure fam) {
    std::vector<Atom> atoms;
    auto qs = fam.quantile_grid(2000);
    // merge duplicate locations (two-point quantiles collapse to 2 atoms)
    for (double q : qs) {
      if (!atoms.empty() && atoms.back().location == q) {
        atoms.back().weight += 1.0 / 2000.0;
      } else {
        atoms.push_back({q, 1.0 / 2000.0});
      }
    }
    double total = 0.0;
    for (auto& a : atoms) total += a.weight;
    for (auto& a : atoms) a.weight /= total;
    return SpectralMeasure::discrete(atoms);
  };
  for (const auto& fam :
       {SpectralMeasure::semicircle(), SpectralMeasure::two_point(0.5),
        SpectralMeasure::marchenko_pastur(2.0)}) {
    TransformProfile exact(fam);
    TransformProfile approx(make(fam), RMode::NumericInversion);
    double cap = std::isinf(exact.h_max()) ? 0.9 : exact.h_max();
    for (double f : {0.1, 0.3, 0.5, 0.7}) {
      double beta = 0.5 * cap * f;
      CHECK(std::abs(free_energy_limit(approx, beta) -
                     free_energy_limit(exact, beta)) < 1e-4);
    }
  }
}

TEST_CASE("beta window and zeta") {
  TransformProfile sc(SpectralMeasure::semicircle());
  BetaWindow w = beta_window(sc, 0.2);
  CHECK(w.zeta == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(w.u_left == doctest::Approx(0.4 * (1.0 - std::tanh(0.4))).epsilon(1e-14));
  CHECK(w.u_right == doctest::Approx(0.4 * (1.0 + std::tanh(0.4))).epsilon(1e-14));
  CHECK(w.u_left >= 0.0);
  CHECK(w.u_left <= 2.0 * 0.2);
  CHECK(2.0 * 0.2 <= w.u_right);

  // R'(z) = lambda/(1-z)^2 is increasing, so the sup sits at u_right; check
  // against both the closed expression and a dense finite-difference scan.
  TransformProfile mp(SpectralMeasure::marchenko_pastur(2.0));
  BetaWindow wm = beta_window(mp, 0.1);
  double expect = 0.01 * 2.0 / ((1.0 - wm.u_right) * (1.0 - wm.u_right));
  CHECK(wm.zeta == doctest::Approx(expect).epsilon(1e-10));
  double grid_max = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    double v = wm.u_left + (wm.u_right - wm.u_left) * i / 2000.0;
    auto r = [&](double z) { return r_transform(mp, z); };
    grid_max = std::max(grid_max, std::abs(oracles::central_diff(r, v, 1e-7)));
  }
  CHECK(wm.zeta == doctest::Approx(0.01 * grid_max).epsilon(1e-6));

  CHECK(beta_window(sc, 1e-3).zeta < 1e-5);
  CHECK_THROWS_AS(beta_window(mp, 0.4), DomainError);  // window exceeds H_max
}

TEST_CASE("small beta series") {
  TransformProfile sc(SpectralMeasure::semicircle());
  CHECK(small_beta_series(sc, 0.05) == doctest::Approx(0.0025).epsilon(1e-15));
  TransformProfile tp(SpectralMeasure::two_point(0.5));
  CHECK(small_beta_series(tp, 0.05) == doctest::Approx(0.0025).epsilon(1e-15));
  CHECK(small_beta_series(sc, 0.0) == 0.0);

  // |I - series| = O(beta^3): the ratio to beta^3 stays bounded as beta halves
  for (const auto& m : all_families()) {
    TransformProfile p(m);
    auto ratio = [&](double beta) {
      return std::abs(free_energy_limit(p, beta) - small_beta_series(p, beta)) /
             (beta * beta * beta);
    };
    double r4 = ratio(0.04);
    double r2 = ratio(0.02);
    double r1 = ratio(0.01);
    CHECK(r2 <= 2.0 * std::max(r4, 1e-6));
    CHECK(r1 <= 2.0 * std::max(r2, 1e-6));
  }
}

TEST_SUITE_END();
