#ifndef OGSG_TRANSFORMS_HPP
#define OGSG_TRANSFORMS_HPP

#include <stdexcept>

#include "ogsg/measures.hpp"

namespace ogsg {

// How R (and its inverses) are evaluated: ClosedForm uses the family's
// analytic expressions where they exist; NumericInversion always goes through
// monotone inversion of the Hilbert transform, which is the generic path and
// the cross-check route for the analytic families.
enum class RMode { ClosedForm, NumericInversion };

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Cached support edges, one-sided Hilbert limits, R range and moments of a
// measure. Immutable after construction; safe to share across threads.
class TransformProfile {
 public:
  explicit TransformProfile(SpectralMeasure measure,
                            RMode mode = RMode::ClosedForm);

  const SpectralMeasure& measure() const { return measure_; }
  RMode mode() const { return mode_; }

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  // One-sided limits of H at the support edges; +/-infinity when divergent.
  double h_min() const { return h_min_; }
  double h_max() const { return h_max_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }

 private:
  SpectralMeasure measure_;
  RMode mode_;
  double lambda_min_, lambda_max_;
  double h_min_, h_max_;
  double x_min_, x_max_;
  double mean_, variance_;
};

// H(z) = integral of 1/(z - t) d mu(t), for z outside the support hull.
double hilbert(const TransformProfile& profile, double z);

// R(z) on (h_min, h_max); R(0) = mean by continuous extension.
double r_transform(const TransformProfile& profile, double z);

// Derivative of R; closed form where available, else central differences.
double r_prime(const TransformProfile& profile, double z);

// Inverse of R: Q(x) on (x_min, x_max), Q(mean) = 0.
double q_transform(const TransformProfile& profile, double x);

// Functional inverse of H: K(z) = R(z) + 1/z, z nonzero in (h_min, h_max).
double k_transform(const TransformProfile& profile, double z);

// I(beta) = 1/2 integral of R over [0, 2 beta]; requires 2 beta < h_max.
double free_energy_limit(const TransformProfile& profile, double beta);

struct BetaWindow {
  double beta = 0.0;
  double u_left = 0.0;
  double u_right = 0.0;
  double zeta = 0.0;  // beta^2 * sup |R'| over [u_left, u_right]
};

BetaWindow beta_window(const TransformProfile& profile, double beta);

// Second-order expansion mean*beta + variance*beta^2 of the free energy.
double small_beta_series(const TransformProfile& profile, double beta);

}  // namespace ogsg

#endif
