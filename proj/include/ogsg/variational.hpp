#ifndef OGSG_VARIATIONAL_HPP
#define OGSG_VARIATIONAL_HPP

#include <array>
#include <stdexcept>

#include <json.hpp>

#include "ogsg/transforms.hpp"

namespace ogsg {

struct NoTransitionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Large-deviations rate of the Rayleigh-quotient observable under Haar
// rotation. Carries the transform profile plus the cached one-sided limits of
// the log potential at the support edges, which the two outer branches need.
class RateFunction {
 public:
  explicit RateFunction(TransformProfile profile);

  const TransformProfile& profile() const { return profile_; }
  bool has_upper_band() const { return has_upper_band_; }
  bool has_lower_band() const { return has_lower_band_; }
  double edge_log_potential_max() const { return edge_log_pot_max_; }
  double edge_log_potential_min() const { return edge_log_pot_min_; }

 private:
  TransformProfile profile_;
  bool has_upper_band_ = false;
  bool has_lower_band_ = false;
  double edge_log_pot_max_ = 0.0;
  double edge_log_pot_min_ = 0.0;
};

// h_x(kappa) = integral of log((kappa - l)/(kappa - x)) d mu(l); kappa outside
// the open support interval and on the same side as the log-argument sign
// conditions require.
double h_x(const TransformProfile& profile, double x, double kappa);

// The three-branch rate function; +infinity outside the support.
double rate_function(const RateFunction& rf, double x);
double rate_derivative(const RateFunction& rf, double x);
double rate_second_derivative(const RateFunction& rf, double x);

// psi(x, y) = beta (x+y) + log cosh beta (x-y) - T(x) - T(y).
double psi(const RateFunction& rf, double beta, double x, double y);

enum class Classification { LocalMax, Saddle, Indefinite };

struct VariationalSolution {
  double x_star = 0.0;
  double y_star = 0.0;
  double psi_value = 0.0;
  std::array<std::array<double, 2>, 2> hessian{{{0.0, 0.0}, {0.0, 0.0}}};
  Classification classification = Classification::Indefinite;
  int iterations = 0;
  bool converged = false;
  // False when the zeta-based contraction bound does not certify the
  // fixed-point map; iteration is still attempted.
  bool contraction_certified = false;

  nlohmann::json to_json() const;
};

// Iterates the stationarity map from (m + 0.01 (x_max - m), m) until the step
// drops below 1e-12; throws num::NoConvergenceError at the iteration cap.
VariationalSolution solve_fixed_point(const RateFunction& rf, double beta);

// Global maximization of psi over the closed support square: 64x64 grid of
// starts, local pattern ascent, Newton polish on interior stationary points.
VariationalSolution maximize_psi(const RateFunction& rf, double beta,
                                 int workers = 0);

// Bisection for the largest beta at which the maximizer stays diagonal and
// matches the symmetric value identity; resolves the transition to beta_tol.
double beta_zero(const RateFunction& rf, double beta_lo, double beta_hi,
                 double beta_tol = 1e-3, int workers = 0);

}  // namespace ogsg

#endif
