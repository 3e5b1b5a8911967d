#ifndef OGSG_MODELS_HPP
#define OGSG_MODELS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ogsg/measures.hpp"
#include "ogsg/transforms.hpp"

namespace ogsg {

enum class ModelKind { SK, ROM, Hopfield, Custom };

// One of the coupling ensembles, plus the data needed to emit its limiting
// spectral measure and sample finite-N spectra.
class ModelSpec {
 public:
  static ModelSpec sk();
  static ModelSpec rom(double p);
  static ModelSpec hopfield(double lambda);
  static ModelSpec custom(SpectralMeasure measure);

  ModelKind kind() const { return kind_; }
  double p() const { return param_; }
  double lambda() const { return param_; }
  const SpectralMeasure& measure() const { return measure_; }
  std::optional<double> beta_validity_hint() const { return beta_hint_; }

  std::string name() const;
  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);

 private:
  ModelSpec(ModelKind kind, double param, SpectralMeasure measure)
      : kind_(kind), param_(param), measure_(std::move(measure)) {}

  ModelKind kind_;
  double param_;
  SpectralMeasure measure_;
  std::optional<double> beta_hint_;
};

// A finite-N spectrum realization: the diagonal of D plus the deterministic
// target diagonal used by the rigidity diagnostics.
struct CouplingSample {
  int n = 0;
  std::vector<double> d_values;
  std::vector<double> expected_d;
  std::uint64_t seed = 0;
};

struct RigidityReport {
  double sup_norm = 0.0;      // max |d_i|
  double w2_to_target = 0.0;  // 2-Wasserstein distance of sorted spectra
  double w2_scaled = 0.0;     // sqrt(N) * w2_to_target
  bool passes_hint = false;
};

SpectralMeasure limiting_measure(const ModelSpec& spec);

// Analytic free-energy limit where the ensemble has one; empty for Custom.
std::optional<double> closed_form_limit(const ModelSpec& spec, double beta);

// Deterministic given (spec, n, seed). Spectra ascend except for ROM, whose
// diagonal is the fixed +1/-1 pattern.
CouplingSample sample_coupling(const ModelSpec& spec, int n, std::uint64_t seed);

RigidityReport rigidity_report(const CouplingSample& sample,
                               double scaled_threshold = 1.0);

// 1/4 - zeta(beta) for the limiting measure; positive means the contraction
// condition holds at this beta.
double condition_c_margin(const ModelSpec& spec, double beta);

}  // namespace ogsg

#endif
