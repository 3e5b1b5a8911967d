#ifndef OGSG_NUMERICS_HPP
#define OGSG_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ogsg::num {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct NoConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb,
                   double c, double fc, double whole, double tol, int depth) {
  double lm = 0.5 * (a + c);
  double rm = 0.5 * (c + b);
  double flm = f(lm);
  double frm = f(rm);
  double h = b - a;
  double left = (h / 12.0) * (fa + 4.0 * flm + fc);
  double right = (h / 12.0) * (fc + 4.0 * frm + fb);
  double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
    return left + right + err / 15.0;
  }
  return simpson_rec(f, a, fa, c, fc, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, c, fc, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance; integrand must be finite on [a,b].
template <class F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol,
                        int max_depth = 40) {
  if (a == b) return 0.0;
  double fa = f(a);
  double fb = f(b);
  double c = 0.5 * (a + b);
  double fc = f(c);
  double whole = ((b - a) / 6.0) * (fa + 4.0 * fc + fb);
  return detail::simpson_rec(f, a, fa, b, fb, c, fc, whole, abs_tol, max_depth);
}

// Solves f(w) = target for monotone f (increasing or decreasing) on a
// bracket. Halves until the bracket collapses to adjacent floats (or the
// iteration cap), then checks the residual target was met. Running to
// collapse matters when f is nearly flat at the root: a residual-only stop
// can leave the abscissa orders of magnitude less accurate than the bracket
// allows.
template <class F>
double bisect_monotone(const F& f, double lo, double hi, double target,
                       double residual_tol, int max_iter = 200) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NoConvergenceError("bisection bracket does not contain the root");
  }
  bool collapsed = false;
  for (int i = 0; i < max_iter; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      collapsed = true;
      break;
    }
    double fmid = f(mid) - target;
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }
  if (!collapsed && std::abs(flo) > residual_tol && std::abs(fhi) > residual_tol) {
    throw NoConvergenceError("bisection did not reach the residual target");
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

// Golden-section maximization of a unimodal-ish function on [a,b].
template <class F>
double golden_max(const F& f, double a, double b, double x_tol) {
  constexpr double inv_phi = 0.6180339887498948482;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > x_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// Streaming log-sum-exp accumulator with deterministic merge.
class LogSumAcc {
 public:
  void add(double exponent) {
    if (exponent <= max_) {
      sum_ += std::exp(exponent - max_);
    } else {
      if (count_ > 0) sum_ = sum_ * std::exp(max_ - exponent) + 1.0;
      else sum_ = 1.0;
      max_ = exponent;
    }
    ++count_;
  }

  void merge(const LogSumAcc& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    if (other.max_ <= max_) {
      sum_ += other.sum_ * std::exp(other.max_ - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
      max_ = other.max_;
    }
    count_ += other.count_;
  }

  // log of the accumulated sum of exp(exponent).
  double log_total() const {
    if (count_ == 0) return -kInf;
    return max_ + std::log(sum_);
  }

  double max_exponent() const { return max_; }
  double scaled_sum() const { return sum_; }  // sum of exp(x - max)
  std::size_t count() const { return count_; }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
  std::size_t count_ = 0;
};

inline double log_cosh(double u) {
  double a = std::abs(u);
  if (a > 20.0) return a - 0.6931471805599453094 + std::log1p(std::exp(-2.0 * a));
  return std::log(std::cosh(u));
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
  }
  return out;
}

// Mean and standard error of a sample.
struct MeanStdErr {
  double mean = 0.0;
  double std_dev = 0.0;
  double std_err = 0.0;
};

inline MeanStdErr mean_std_err(const std::vector<double>& xs) {
  MeanStdErr r;
  if (xs.empty()) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double q = 0.0;
    for (double x : xs) q += (x - r.mean) * (x - r.mean);
    r.std_dev = std::sqrt(q / static_cast<double>(xs.size() - 1));
    r.std_err = r.std_dev / std::sqrt(static_cast<double>(xs.size()));
  }
  return r;
}

}  // namespace ogsg::num

#endif
