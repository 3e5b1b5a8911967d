#include "ogsg/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "ogsg/numerics.hpp"

namespace ogsg {

namespace {

using num::kInf;

double hilbert_closed(const SpectralMeasure& m, double z) {
  switch (m.kind()) {
    case MeasureKind::Semicircle: {
      // Branch chosen so H -> 0 at infinity; rationalized to avoid
      // cancellation far from the support.
      double s = std::sqrt(z * z - 4.0);
      return z > 0.0 ? 2.0 / (z + s) : 2.0 / (z - s);
    }
    case MeasureKind::TwoPoint: {
      double mean = 2.0 * m.p() - 1.0;
      return (z + mean) / (z * z - 1.0);
    }
    case MeasureKind::MarchenkoPastur: {
      double l = m.aspect_ratio();
      double b = z - 1.0 - l;
      double s = std::sqrt(b * b - 4.0 * l);
      // 2/(z+1-l +/- s) is the rationalized form of (z+1-l -/+ s)/(2z);
      // + above the support, - below (the component containing 0).
      return z > m.lambda_max() ? 2.0 / (z + 1.0 - l + s)
                                : 2.0 / (z + 1.0 - l - s);
    }
    case MeasureKind::Discrete: {
      double acc = 0.0;
      for (const Atom& a : m.atoms()) acc += a.weight / (z - a.location);
      return acc;
    }
  }
  return 0.0;
}

// Inverts H on the correct side of the support: w > lambda_max for z > 0,
// w < lambda_min for z < 0. The bracket follows from H(w) ~ 1/w.
double invert_hilbert(const TransformProfile& p, double z) {
  const SpectralMeasure& m = p.measure();
  auto h = [&](double w) { return hilbert_closed(m, w); };
  double eps, lo, hi;
  if (z > 0.0) {
    eps = 1e-12 * (1.0 + std::abs(p.lambda_max()));
    lo = p.lambda_max() + eps;
    hi = p.lambda_max() + 1.0 / z + std::abs(p.mean()) + 1.0;
  } else {
    eps = 1e-12 * (1.0 + std::abs(p.lambda_min()));
    hi = p.lambda_min() - eps;
    lo = p.lambda_min() - 1.0 / std::abs(z) - std::abs(p.mean()) - 1.0;
  }
  return num::bisect_monotone(h, lo, hi, z, 1e-13, 200);
}

void require_r_domain(const TransformProfile& p, double z, const char* op) {
  if (!(z > p.h_min() && z < p.h_max())) {
    throw DomainError(std::string(op) + ": argument outside (H_min, H_max)");
  }
}

// Series of R for the two-point family near 0, where the closed form cancels.
double two_point_r_series(double mean, double z) {
  double v = 1.0 - mean * mean;
  return mean + v * z + 2.0 * mean * (mean * mean - 1.0) * z * z;
}

}  // namespace

TransformProfile::TransformProfile(SpectralMeasure measure, RMode mode)
    : measure_(std::move(measure)), mode_(mode) {
  lambda_min_ = measure_.lambda_min();
  lambda_max_ = measure_.lambda_max();
  mean_ = measure_.mean();
  variance_ = measure_.variance();
  switch (measure_.kind()) {
    case MeasureKind::Semicircle:
      h_min_ = -1.0;
      h_max_ = 1.0;
      break;
    case MeasureKind::TwoPoint:
      h_min_ = -kInf;
      h_max_ = kInf;
      break;
    case MeasureKind::MarchenkoPastur: {
      double s = std::sqrt(measure_.aspect_ratio());
      h_min_ = 1.0 / (1.0 - s);
      h_max_ = 1.0 / (1.0 + s);
      break;
    }
    case MeasureKind::Discrete: {
      // One-sided limits probed just outside the extreme atoms.
      if (lambda_max_ > lambda_min_) {
        double above = hilbert_closed(measure_, lambda_max_ + 1e-9);
        double below = hilbert_closed(measure_, lambda_min_ - 1e-9);
        h_max_ = std::abs(above) > 1e8 ? kInf : above;
        h_min_ = std::abs(below) > 1e8 ? -kInf : below;
      } else {
        h_max_ = kInf;
        h_min_ = -kInf;
      }
      break;
    }
  }
  x_min_ = std::isinf(h_min_) ? lambda_min_ : lambda_min_ - 1.0 / h_min_;
  x_max_ = std::isinf(h_max_) ? lambda_max_ : lambda_max_ - 1.0 / h_max_;
  bool degenerate = lambda_min_ == lambda_max_;
  if (!degenerate && !(x_min_ < mean_ && mean_ < x_max_)) {
    throw std::invalid_argument("TransformProfile: x_min < mean < x_max violated");
  }
}

double hilbert(const TransformProfile& profile, double z) {
  if (z >= profile.lambda_min() && z <= profile.lambda_max()) {
    throw DomainError("hilbert: argument inside the support interval");
  }
  return hilbert_closed(profile.measure(), z);
}

double r_transform(const TransformProfile& profile, double z) {
  require_r_domain(profile, z, "r_transform");
  if (z == 0.0) return profile.mean();
  // Below this scale the inversion root sits at ~1/z where doubles cannot
  // resolve R = w - 1/z; the second-order extension is far more accurate.
  if (std::abs(z) < 1e-7) {
    return profile.mean() + profile.variance() * z;
  }
  const SpectralMeasure& m = profile.measure();
  if (profile.mode() == RMode::ClosedForm) {
    switch (m.kind()) {
      case MeasureKind::Semicircle:
        return z;
      case MeasureKind::TwoPoint: {
        double mean = profile.mean();
        if (std::abs(z) < 1e-5) return two_point_r_series(mean, z);
        double g = 1.0 + 4.0 * z * (mean + z);
        return (std::sqrt(g) - 1.0) / (2.0 * z);
      }
      case MeasureKind::MarchenkoPastur:
        return m.aspect_ratio() / (1.0 - z);
      case MeasureKind::Discrete:
        break;
    }
  }
  return invert_hilbert(profile, z) - 1.0 / z;
}

double r_prime(const TransformProfile& profile, double z) {
  require_r_domain(profile, z, "r_prime");
  const SpectralMeasure& m = profile.measure();
  if (profile.mode() == RMode::ClosedForm) {
    switch (m.kind()) {
      case MeasureKind::Semicircle:
        return 1.0;
      case MeasureKind::TwoPoint: {
        double mean = profile.mean();
        if (std::abs(z) < 1e-6) {
          return (1.0 - mean * mean) + 4.0 * mean * (mean * mean - 1.0) * z;
        }
        double g = 1.0 + 4.0 * z * (mean + z);
        double sg = std::sqrt(g);
        return (sg - 1.0 - 2.0 * mean * z) / (2.0 * z * z * sg);
      }
      case MeasureKind::MarchenkoPastur: {
        double l = m.aspect_ratio();
        return l / ((1.0 - z) * (1.0 - z));
      }
      case MeasureKind::Discrete:
        break;
    }
  }
  double h = 1e-6 * std::max(1.0, std::abs(z));
  double lo = z - h;
  double hi = z + h;
  if (hi >= profile.h_max()) {
    hi = z;
    lo = z - 2.0 * h;
  } else if (lo <= profile.h_min()) {
    lo = z;
    hi = z + 2.0 * h;
  }
  return (r_transform(profile, hi) - r_transform(profile, lo)) / (hi - lo);
}

double q_transform(const TransformProfile& profile, double x) {
  if (!(x > profile.x_min() && x < profile.x_max())) {
    throw DomainError("q_transform: argument outside (x_min, x_max)");
  }
  double mean = profile.mean();
  if (x == mean) return 0.0;
  const SpectralMeasure& m = profile.measure();
  if (profile.mode() == RMode::ClosedForm) {
    switch (m.kind()) {
      case MeasureKind::Semicircle:
        return x;
      case MeasureKind::TwoPoint:
        return (x - mean) / (1.0 - x * x);
      case MeasureKind::MarchenkoPastur:
        return 1.0 - m.aspect_ratio() / x;
      case MeasureKind::Discrete:
        break;
    }
  }
  // Monotone root-find on R. Expand toward the relevant H edge until the
  // root is bracketed; R(z) -> x_max (resp. x_min) there, so it must be.
  auto r = [&](double z) { return r_transform(profile, z); };
  double lo = 0.0;
  double hi = 0.0;
  if (x > mean) {
    double edge = profile.h_max();
    hi = std::isinf(edge) ? 1.0 : 0.5 * edge;
    for (int i = 0; i < 200 && r(hi) < x; ++i) {
      hi = std::isinf(edge) ? 2.0 * hi : edge - 0.5 * (edge - hi);
    }
  } else {
    double edge = profile.h_min();
    lo = std::isinf(edge) ? -1.0 : 0.5 * edge;
    for (int i = 0; i < 200 && r(lo) > x; ++i) {
      lo = std::isinf(edge) ? 2.0 * lo : edge - 0.5 * (edge - lo);
    }
  }
  return num::bisect_monotone(r, lo, hi, x, 1e-13, 200);
}

double k_transform(const TransformProfile& profile, double z) {
  require_r_domain(profile, z, "k_transform");
  if (z == 0.0) throw DomainError("k_transform: argument must be nonzero");
  if (profile.mode() == RMode::NumericInversion ||
      profile.measure().kind() == MeasureKind::Discrete) {
    return invert_hilbert(profile, z);
  }
  return r_transform(profile, z) + 1.0 / z;
}

double free_energy_limit(const TransformProfile& profile, double beta) {
  if (!(beta >= 0.0)) throw DomainError("free_energy_limit: beta must be >= 0");
  if (!(2.0 * beta < profile.h_max())) {
    throw DomainError("free_energy_limit: 2*beta must be below H_max");
  }
  if (beta == 0.0) return 0.0;
  const SpectralMeasure& m = profile.measure();
  if (profile.mode() == RMode::ClosedForm) {
    switch (m.kind()) {
      case MeasureKind::Semicircle:
        return beta * beta;
      case MeasureKind::TwoPoint: {
        if (m.p() == 0.5) {
          double s = std::sqrt(16.0 * beta * beta + 1.0);
          return 0.25 * (s + std::log((s - 1.0) / (8.0 * beta * beta)) - 1.0);
        }
        break;  // generic quadrature over the closed-form R below
      }
      case MeasureKind::MarchenkoPastur:
        return 0.5 * m.aspect_ratio() * std::log(1.0 / (1.0 - 2.0 * beta));
      case MeasureKind::Discrete:
        break;
    }
  }
  auto r = [&](double v) { return r_transform(profile, v); };
  return 0.5 * num::adaptive_simpson(r, 0.0, 2.0 * beta, 1e-11, 40);
}

BetaWindow beta_window(const TransformProfile& profile, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta_window: beta must be positive");
  BetaWindow w;
  w.beta = beta;
  double span = profile.x_max() - profile.x_min();
  double t = std::tanh(beta * span);
  w.u_left = 2.0 * beta * (1.0 - t);
  w.u_right = 2.0 * beta * (1.0 + t);
  if (!(w.u_right < profile.h_max())) {
    throw DomainError("beta_window: window exceeds the domain of R");
  }
  // R is increasing, so |R'| = R'. 512-point scan plus golden-section polish.
  auto negmod = [&](double v) { return std::abs(r_prime(profile, v)); };
  const int kGrid = 512;
  double best = 0.0;
  double best_v = w.u_left;
  for (int i = 0; i < kGrid; ++i) {
    double v = w.u_left + (w.u_right - w.u_left) * i / (kGrid - 1.0);
    double val = negmod(v);
    if (val > best) {
      best = val;
      best_v = v;
    }
  }
  double step = (w.u_right - w.u_left) / (kGrid - 1.0);
  double lo = std::max(w.u_left, best_v - step);
  double hi = std::min(w.u_right, best_v + step);
  if (hi > lo) {
    double v = num::golden_max(negmod, lo, hi, 1e-10 * std::max(1.0, hi));
    best = std::max(best, negmod(v));
  }
  w.zeta = beta * beta * best;
  return w;
}

double small_beta_series(const TransformProfile& profile, double beta) {
  return profile.mean() * beta + profile.variance() * beta * beta;
}

}  // namespace ogsg
