#ifndef OGSG_MEASURES_HPP
#define OGSG_MEASURES_HPP

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ogsg {

enum class MeasureKind { Semicircle, TwoPoint, MarchenkoPastur, Discrete };

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

// A compactly supported probability measure on the real line: one of the
// three analytic families used by the model ensembles, or a finite list of
// atoms. Immutable after construction.
class SpectralMeasure {
 public:
  static SpectralMeasure semicircle();
  // Two atoms: weight p at +1, weight 1-p at -1; p in (0,1).
  static SpectralMeasure two_point(double p);
  // Covariance-type law with aspect ratio lambda > 1; support [(1-sqrt(l))^2, (1+sqrt(l))^2].
  static SpectralMeasure marchenko_pastur(double lambda);
  // Atoms sorted ascending, strictly positive weights summing to 1.
  static SpectralMeasure discrete(std::vector<Atom> atoms);

  MeasureKind kind() const { return kind_; }
  double p() const { return param_; }
  double aspect_ratio() const { return param_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  // Integral of g against the measure. Analytic families integrate through a
  // trigonometric substitution that removes the square-root edge of the
  // density, so the integrand handed to the quadrature is smooth.
  double integrate(const std::function<double(double)>& g,
                   double abs_tol = 1e-12) const;

  double cdf(double x) const;
  // n locations at quantile levels (i - 1/2)/n, ascending.
  std::vector<double> quantile_grid(int n) const;

  nlohmann::json to_json() const;
  static SpectralMeasure from_json(const nlohmann::json& j);

 private:
  SpectralMeasure() = default;

  MeasureKind kind_ = MeasureKind::Semicircle;
  double param_ = 0.0;
  std::vector<Atom> atoms_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

}  // namespace ogsg

#endif
