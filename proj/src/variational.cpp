#include "ogsg/variational.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ogsg/numerics.hpp"
#include "ogsg/parallel.hpp"

namespace ogsg {

namespace {

using num::kInf;

// Integral of log|z - l| d mu(l) for z outside the support hull.
double log_potential(const SpectralMeasure& m, double z) {
  switch (m.kind()) {
    case MeasureKind::Semicircle: {
      double a = std::abs(z);
      if (a >= 64.0) {
        // log|z| - sum C_k/(2k) z^{-2k} with Catalan numbers 1, 2, 5, 14.
        double iz2 = 1.0 / (z * z);
        return std::log(a) -
               iz2 * (0.5 + iz2 * (0.5 + iz2 * (5.0 / 6.0 + iz2 * 1.75)));
      }
      double s = std::sqrt(a * a - 4.0);
      return 0.25 * a * a - 0.5 - 0.25 * a * s + std::log(0.5 * (a + s));
    }
    case MeasureKind::MarchenkoPastur:
      return m.integrate([&](double l) { return std::log(std::abs(z - l)); },
                         1e-11);
    case MeasureKind::TwoPoint:
    case MeasureKind::Discrete: {
      double acc = 0.0;
      for (const Atom& a : m.atoms()) {
        acc += a.weight * std::log(std::abs(z - a.location));
      }
      return acc;
    }
  }
  return 0.0;
}

// One-sided limit of the log potential at a support edge, probed at
// 10^-4 .. 10^-9 with geometric extrapolation; divergence maps to +infinity.
double edge_log_potential(const SpectralMeasure& m, double edge, int side) {
  std::vector<double> vals;
  for (int k = 4; k <= 9; ++k) {
    double delta = std::pow(10.0, -k);
    vals.push_back(log_potential(m, edge + side * delta));
  }
  double v = vals.back();
  double d1 = vals[vals.size() - 1] - vals[vals.size() - 2];
  double d0 = vals[vals.size() - 2] - vals[vals.size() - 3];
  if (std::abs(d1) <= 1e-10 * (1.0 + std::abs(v))) return v;
  if (d0 != 0.0) {
    double rho = d1 / d0;
    if (std::abs(rho) < 0.9) return v + d1 * rho / (1.0 - rho);
  }
  return kInf;
}

double middle_branch(const RateFunction& rf, double x);

}  // namespace

RateFunction::RateFunction(TransformProfile profile)
    : profile_(std::move(profile)) {
  has_upper_band_ = profile_.x_max() < profile_.lambda_max();
  has_lower_band_ = profile_.x_min() > profile_.lambda_min();
  if (has_upper_band_) {
    edge_log_pot_max_ =
        edge_log_potential(profile_.measure(), profile_.lambda_max(), +1);
  }
  if (has_lower_band_) {
    edge_log_pot_min_ =
        edge_log_potential(profile_.measure(), profile_.lambda_min(), -1);
  }
}

double h_x(const TransformProfile& profile, double x, double kappa) {
  if (kappa > profile.lambda_min() && kappa < profile.lambda_max()) {
    throw DomainError("h_x: kappa inside the open support interval");
  }
  if (kappa >= profile.lambda_max() ? !(x < kappa) : !(x > kappa)) {
    throw DomainError("h_x: log argument sign violated");
  }
  const SpectralMeasure& m = profile.measure();
  // (kappa - l)/(kappa - x) = 1 + (x - l)/(kappa - x); log1p keeps large
  // kappa (the x -> mean limit of the middle branch) well conditioned. The
  // guard covers kappa exactly at a support edge, where the density vanishes
  // and the integrand's limit is zero.
  auto term = [&](double l) {
    double u = (x - l) / (kappa - x);
    if (u <= -1.0) return 0.0;
    return std::log1p(u);
  };
  switch (m.kind()) {
    case MeasureKind::TwoPoint:
    case MeasureKind::Discrete: {
      double acc = 0.0;
      for (const Atom& a : m.atoms()) acc += a.weight * term(a.location);
      return acc;
    }
    case MeasureKind::Semicircle: {
      if (std::abs(kappa) >= 64.0) {
        double ik2 = 1.0 / (kappa * kappa);
        double tail =
            ik2 * (0.5 + ik2 * (0.5 + ik2 * (5.0 / 6.0 + ik2 * 1.75)));
        return -std::log1p(-x / kappa) - tail;
      }
      return log_potential(m, kappa) -
             std::log(std::abs(kappa - x));
    }
    case MeasureKind::MarchenkoPastur: {
      // Fixed midpoint rule in the angle substitution. The cos^2 factor
      // zeroes the endpoint derivatives, so the rule is O(h^4)-accurate and,
      // unlike an adaptive scheme, its error moves smoothly with x; that
      // keeps 1e-6 finite-difference probes of the rate function clean.
      const int kPanels = 8192;
      const double l = m.aspect_ratio();
      const double s = std::sqrt(l);
      const double pi = 3.14159265358979323846;
      const double h = pi / kPanels;
      double acc = 0.0;
      for (int i = 0; i < kPanels; ++i) {
        double theta = -0.5 * pi + (i + 0.5) * h;
        double c = std::cos(theta);
        double lam = 1.0 + l + 2.0 * s * std::sin(theta);
        acc += term(lam) * (2.0 * l / pi) * c * c / lam;
      }
      return acc * h;
    }
  }
  return 0.0;
}

namespace {

double middle_branch(const RateFunction& rf, double x) {
  const TransformProfile& p = rf.profile();
  if (x == p.mean()) return 0.0;
  double z = q_transform(p, x);
  double kappa = k_transform(p, z);
  // Rounding can land K(Q(x)) a hair inside the support near x_min/x_max;
  // pin it to the correct side.
  if (z > 0.0) {
    kappa = std::max(kappa, p.lambda_max());
  } else {
    kappa = std::min(kappa, p.lambda_min());
  }
  return 0.5 * h_x(p, x, kappa);
}

}  // namespace

double rate_function(const RateFunction& rf, double x) {
  const TransformProfile& p = rf.profile();
  if (x < p.lambda_min() || x > p.lambda_max()) return kInf;
  if (x > p.x_min() && x < p.x_max()) return middle_branch(rf, x);
  if (rf.has_upper_band() && x >= p.x_max() && x < p.lambda_max()) {
    // The x_max seam evaluates the same one-sided limit the middle branch
    // attains there; both outer branches share the x-independent edge value.
    double lp = rf.edge_log_potential_max();
    return std::isinf(lp) ? kInf : 0.5 * (lp - std::log(p.lambda_max() - x));
  }
  if (rf.has_lower_band() && x <= p.x_min() && x > p.lambda_min()) {
    double lp = rf.edge_log_potential_min();
    return std::isinf(lp) ? kInf : 0.5 * (lp - std::log(x - p.lambda_min()));
  }
  if (x == p.mean()) return 0.0;  // point-mass degenerate support
  return kInf;
}

double rate_derivative(const RateFunction& rf, double x) {
  const TransformProfile& p = rf.profile();
  if (x > p.x_min() && x < p.x_max()) return 0.5 * q_transform(p, x);
  if (rf.has_upper_band() && x >= p.x_max() && x < p.lambda_max()) {
    return 0.5 / (p.lambda_max() - x);
  }
  if (rf.has_lower_band() && x <= p.x_min() && x > p.lambda_min()) {
    return 0.5 / (p.lambda_min() - x);
  }
  throw DomainError("rate_derivative: x outside the differentiable region");
}

double rate_second_derivative(const RateFunction& rf, double x) {
  const TransformProfile& p = rf.profile();
  if (x > p.x_min() && x < p.x_max()) {
    return 0.5 / r_prime(p, q_transform(p, x));
  }
  if (rf.has_upper_band() && x >= p.x_max() && x < p.lambda_max()) {
    double d = p.lambda_max() - x;
    return 0.5 / (d * d);
  }
  if (rf.has_lower_band() && x <= p.x_min() && x > p.lambda_min()) {
    double d = p.lambda_min() - x;
    return 0.5 / (d * d);
  }
  throw DomainError("rate_second_derivative: x outside the differentiable region");
}

double psi(const RateFunction& rf, double beta, double x, double y) {
  double tx = rate_function(rf, x);
  double ty = rate_function(rf, y);
  if (std::isinf(tx) || std::isinf(ty)) return -kInf;
  // grouped so that psi(x, y) == psi(y, x) holds bitwise
  return beta * (x + y) + num::log_cosh(beta * (x - y)) - (tx + ty);
}

nlohmann::json VariationalSolution::to_json() const {
  nlohmann::json j;
  j["x_star"] = x_star;
  j["y_star"] = y_star;
  j["psi"] = psi_value;
  j["hessian"] = {{hessian[0][0], hessian[0][1]}, {hessian[1][0], hessian[1][1]}};
  switch (classification) {
    case Classification::LocalMax: j["classification"] = "local_max"; break;
    case Classification::Saddle: j["classification"] = "saddle"; break;
    case Classification::Indefinite: j["classification"] = "indefinite"; break;
  }
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["contraction_certified"] = contraction_certified;
  return j;
}

namespace {

void fill_hessian(const RateFunction& rf, double beta, VariationalSolution& s) {
  double sech = 1.0 / std::cosh(beta * (s.x_star - s.y_star));
  double c = beta * beta * sech * sech;
  double txx = rate_second_derivative(rf, s.x_star);
  double tyy = rate_second_derivative(rf, s.y_star);
  s.hessian = {{{-txx + c, -c}, {-c, -tyy + c}}};
  double tr = s.hessian[0][0] + s.hessian[1][1];
  double det = s.hessian[0][0] * s.hessian[1][1] - c * c;
  if (det > 0.0 && tr < 0.0) {
    s.classification = Classification::LocalMax;
  } else if (det < 0.0) {
    s.classification = Classification::Saddle;
  } else {
    s.classification = Classification::Indefinite;
  }
}

bool contraction_bound_holds(const TransformProfile& p, double beta) {
  try {
    return beta_window(p, beta).zeta < 0.25;
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace

VariationalSolution solve_fixed_point(const RateFunction& rf, double beta) {
  const TransformProfile& p = rf.profile();
  VariationalSolution sol;
  if (beta == 0.0) {
    sol.x_star = p.mean();
    sol.y_star = p.mean();
    sol.psi_value = 0.0;
    sol.converged = true;
    sol.contraction_certified = true;
    fill_hessian(rf, beta, sol);
    return sol;
  }
  sol.contraction_certified = contraction_bound_holds(p, beta);

  // The global bound 2 beta (1 + tanh(beta span)) < H_max guarantees G maps
  // the whole square into itself, but near-diagonal trajectories stay valid
  // well past it (the arguments stay near 2 beta). Evaluate lazily and let a
  // trajectory that actually leaves the domain of R raise the domain error.
  auto map = [&](double x, double y, double& gx, double& gy) {
    double t = std::tanh(beta * (x - y));
    gx = r_transform(p, 2.0 * beta * (1.0 + t));
    gy = r_transform(p, 2.0 * beta * (1.0 - t));
  };

  double x = p.mean() + 0.01 * (p.x_max() - p.mean());
  double y = p.mean();
  double damping = 1.0;
  double prev_step = kInf;
  int oscillations = 0;
  const int kMaxIter = 10000;
  for (int it = 1; it <= kMaxIter; ++it) {
    double gx, gy;
    map(x, y, gx, gy);
    double nx = x + damping * (gx - x);
    double ny = y + damping * (gy - y);
    double step = std::max(std::abs(nx - x), std::abs(ny - y));
    x = nx;
    y = ny;
    if (step < 1e-12) {
      sol.iterations = it;
      double rx, ry;
      map(x, y, rx, ry);
      double residual = std::max(std::abs(x - rx), std::abs(y - ry));
      sol.x_star = x;
      sol.y_star = y;
      sol.psi_value = psi(rf, beta, x, y);
      sol.converged = residual < 1e-11;
      fill_hessian(rf, beta, sol);
      return sol;
    }
    if (step > prev_step && it > 10) {
      if (++oscillations >= 5 && damping == 1.0) damping = 0.5;
    }
    prev_step = step;
  }
  throw num::NoConvergenceError("solve_fixed_point: iteration cap reached");
}

namespace {

struct Candidate {
  double x = 0.0;
  double y = 0.0;
  double value = -kInf;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.x != b.x) return a.x < b.x;  // deterministic tie-break
  return a.y < b.y;
}

// Derivative-free local ascent: compass moves with a shrinking step.
Candidate pattern_ascent(const RateFunction& rf, double beta, Candidate c,
                         double step, double step_tol, int* evals) {
  const TransformProfile& p = rf.profile();
  double lo = p.lambda_min();
  double hi = p.lambda_max();
  auto val = [&](double x, double y) {
    ++*evals;
    if (x <= lo || x >= hi || y <= lo || y >= hi) return -kInf;
    return psi(rf, beta, x, y);
  };
  while (step > step_tol) {
    Candidate best = c;
    const double dx[4] = {step, -step, 0.0, 0.0};
    const double dy[4] = {0.0, 0.0, step, -step};
    for (int k = 0; k < 4; ++k) {
      Candidate trial{c.x + dx[k], c.y + dy[k], 0.0};
      trial.value = val(trial.x, trial.y);
      if (better(trial, best)) best = trial;
    }
    if (better(best, c)) {
      c = best;
    } else {
      step *= 0.5;
    }
  }
  return c;
}

// Newton polish of an interior stationary point of psi; analytic gradient and
// Hessian. Falls back to the incoming point if the step misbehaves.
Candidate newton_polish(const RateFunction& rf, double beta, Candidate c) {
  const TransformProfile& p = rf.profile();
  double margin = 1e-12 * (1.0 + std::abs(p.x_max()) + std::abs(p.x_min()));
  for (int it = 0; it < 60; ++it) {
    if (!(c.x > p.x_min() + margin && c.x < p.x_max() - margin &&
          c.y > p.x_min() + margin && c.y < p.x_max() - margin)) {
      break;
    }
    double t = std::tanh(beta * (c.x - c.y));
    double gx = beta * (1.0 + t) - rate_derivative(rf, c.x);
    double gy = beta * (1.0 - t) - rate_derivative(rf, c.y);
    double sech2 = (1.0 - t) * (1.0 + t);
    double cc = beta * beta * sech2;
    double hxx = -rate_second_derivative(rf, c.x) + cc;
    double hyy = -rate_second_derivative(rf, c.y) + cc;
    double hxy = -cc;
    double det = hxx * hyy - hxy * hxy;
    if (det == 0.0) break;
    double sx = (hyy * gx - hxy * gy) / det;
    double sy = (hxx * gy - hxy * gx) / det;
    double nx = c.x - sx;
    double ny = c.y - sy;
    if (!(nx > p.x_min() + margin && nx < p.x_max() - margin &&
          ny > p.x_min() + margin && ny < p.x_max() - margin)) {
      break;
    }
    double nv = psi(rf, beta, nx, ny);
    if (!(nv >= c.value - 1e-9)) break;
    double moved = std::max(std::abs(nx - c.x), std::abs(ny - c.y));
    c = {nx, ny, nv};
    if (moved < 1e-13) break;
  }
  return c;
}

}  // namespace

VariationalSolution maximize_psi(const RateFunction& rf, double beta,
                                 int workers) {
  const TransformProfile& p = rf.profile();
  const int kGrid = 64;
  double lo = p.lambda_min();
  double hi = p.lambda_max();
  double cell = (hi - lo) / kGrid;

  std::vector<double> axis(kGrid);
  std::vector<double> t_axis(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    axis[static_cast<std::size_t>(i)] = lo + (i + 0.5) * cell;
    t_axis[static_cast<std::size_t>(i)] =
        rate_function(rf, axis[static_cast<std::size_t>(i)]);
  }

  std::vector<Candidate> cells;
  cells.reserve(static_cast<std::size_t>(kGrid) * kGrid);
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      double tx = t_axis[static_cast<std::size_t>(i)];
      double ty = t_axis[static_cast<std::size_t>(j)];
      double x = axis[static_cast<std::size_t>(i)];
      double y = axis[static_cast<std::size_t>(j)];
      double v = (std::isinf(tx) || std::isinf(ty))
                     ? -kInf
                     : beta * (x + y) + num::log_cosh(beta * (x - y)) - tx - ty;
      cells.push_back({x, y, v});
    }
  }
  std::stable_sort(cells.begin(), cells.end(), better);
  const std::size_t kStarts = 16;
  std::vector<Candidate> starts(cells.begin(),
                                cells.begin() + std::min(kStarts, cells.size()));
  try {
    VariationalSolution fp = solve_fixed_point(rf, beta);
    starts.push_back({fp.x_star, fp.y_star, fp.psi_value});
  } catch (const std::exception&) {
    // symmetric candidate unavailable; grid starts remain
  }

  std::vector<Candidate> polished(starts.size());
  std::vector<int> evals(starts.size(), 0);
  parallel_tasks(starts.size(), workers, [&](std::size_t s) {
    Candidate c = pattern_ascent(rf, beta, starts[s], cell, 1e-8 * (hi - lo),
                                 &evals[s]);
    polished[s] = newton_polish(rf, beta, c);
  });

  Candidate best = polished.front();
  int total_evals = 0;
  for (std::size_t s = 0; s < polished.size(); ++s) {
    if (better(polished[s], best)) best = polished[s];
    total_evals += evals[s];
  }

  VariationalSolution sol;
  sol.x_star = best.x;
  sol.y_star = best.y;
  sol.psi_value = best.value;
  sol.iterations = total_evals;
  sol.converged = std::isfinite(best.value);
  sol.contraction_certified = contraction_bound_holds(p, beta);
  try {
    fill_hessian(rf, beta, sol);
  } catch (const DomainError&) {
    sol.classification = Classification::Indefinite;
  }
  return sol;
}

double beta_zero(const RateFunction& rf, double beta_lo, double beta_hi,
                 double beta_tol, int workers) {
  const TransformProfile& p = rf.profile();
  auto symmetric_value = [&](double beta, double* out) {
    if (!(2.0 * beta > p.h_min() && 2.0 * beta < p.h_max())) return false;
    double a = r_transform(p, 2.0 * beta);
    if (!(a > p.x_min() && a < p.x_max())) return false;
    *out = 2.0 * (beta * a - rate_function(rf, a));
    return true;
  };
  auto diagonal = [&](double beta) {
    double target = 0.0;
    if (!symmetric_value(beta, &target)) return false;
    VariationalSolution sol = maximize_psi(rf, beta, workers);
    return std::abs(sol.x_star - sol.y_star) < 1e-6 &&
           std::abs(sol.psi_value - target) < 1e-8;
  };
  bool lo_diag = diagonal(beta_lo);
  bool hi_diag = diagonal(beta_hi);
  if (lo_diag == hi_diag) {
    throw NoTransitionError("beta_zero: predicate constant on the interval");
  }
  while (beta_hi - beta_lo > beta_tol) {
    double mid = 0.5 * (beta_lo + beta_hi);
    if (diagonal(mid) == lo_diag) {
      beta_lo = mid;
    } else {
      beta_hi = mid;
    }
  }
  return 0.5 * (beta_lo + beta_hi);
}

}  // namespace ogsg
