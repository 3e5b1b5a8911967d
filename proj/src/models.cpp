#include "ogsg/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "ogsg/numerics.hpp"
#include "ogsg/rng.hpp"

namespace ogsg {

namespace {

constexpr int kEigenCap = 4096;  // dense-solver budget for desk scale

std::vector<double> sk_spectrum(int n, std::uint64_t seed) {
  Rng rng(Rng::substream(seed, 0));
  Eigen::MatrixXd w(n, n);
  double off = 1.0 / std::sqrt(static_cast<double>(n));
  double diag = std::sqrt(2.0 / static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    w(i, i) = diag * rng.gaussian();
    for (int j = i + 1; j < n; ++j) {
      double g = off * rng.gaussian();
      w(i, j) = g;
      w(j, i) = g;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + n};
}

std::vector<double> hopfield_spectrum(int n, double lambda, std::uint64_t seed) {
  int p = static_cast<int>(std::llround(lambda * n));
  if (p < n + 1) {
    throw std::invalid_argument("sample_coupling: hopfield needs round(lambda*n) >= n+1");
  }
  Rng rng(Rng::substream(seed, 0));
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.gaussian();
  }
  // Scaled so the empirical spectrum matches the limiting law with mean
  // lambda and edges (1 +/- sqrt(lambda))^2.
  Eigen::MatrixXd gram = (x * x.transpose()) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + n};
}

}  // namespace

ModelSpec ModelSpec::sk() {
  ModelSpec spec(ModelKind::SK, 0.0, SpectralMeasure::semicircle());
  spec.beta_hint_ = 0.5;
  return spec;
}

ModelSpec ModelSpec::rom(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("rom: p must lie in (0,1)");
  }
  return ModelSpec(ModelKind::ROM, p, SpectralMeasure::two_point(p));
}

ModelSpec ModelSpec::hopfield(double lambda) {
  if (!(lambda > 1.0)) {
    throw std::invalid_argument("hopfield: lambda must exceed 1");
  }
  return ModelSpec(ModelKind::Hopfield, lambda,
                   SpectralMeasure::marchenko_pastur(lambda));
}

ModelSpec ModelSpec::custom(SpectralMeasure measure) {
  return ModelSpec(ModelKind::Custom, 0.0, std::move(measure));
}

std::string ModelSpec::name() const {
  switch (kind_) {
    case ModelKind::SK: return "sk";
    case ModelKind::ROM: return "rom";
    case ModelKind::Hopfield: return "hopfield";
    case ModelKind::Custom: return "custom";
  }
  return "?";
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = name();
  if (kind_ == ModelKind::ROM) j["p"] = param_;
  if (kind_ == ModelKind::Hopfield) j["lambda"] = param_;
  if (kind_ == ModelKind::Custom) j["measure"] = measure_.to_json();
  return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("model: missing \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "sk") return sk();
  if (kind == "rom") {
    if (!j.contains("p")) throw std::invalid_argument("model: rom needs \"p\"");
    return rom(j["p"].get<double>());
  }
  if (kind == "hopfield") {
    if (!j.contains("lambda")) {
      throw std::invalid_argument("model: hopfield needs \"lambda\"");
    }
    return hopfield(j["lambda"].get<double>());
  }
  if (kind == "custom") {
    if (!j.contains("measure")) {
      throw std::invalid_argument("model: custom needs \"measure\"");
    }
    return custom(SpectralMeasure::from_json(j["measure"]));
  }
  throw std::invalid_argument("model: unknown kind \"" + kind + "\"");
}

SpectralMeasure limiting_measure(const ModelSpec& spec) {
  return spec.measure();
}

std::optional<double> closed_form_limit(const ModelSpec& spec, double beta) {
  if (!(beta >= 0.0)) throw DomainError("closed_form_limit: beta must be >= 0");
  switch (spec.kind()) {
    case ModelKind::SK:
      return beta * beta;
    case ModelKind::ROM: {
      double m = 2.0 * spec.p() - 1.0;
      if (spec.p() == 0.5) {
        if (beta == 0.0) return 0.0;
        double s = std::sqrt(16.0 * beta * beta + 1.0);
        return 0.25 * (s + std::log((s - 1.0) / (8.0 * beta * beta)) - 1.0);
      }
      // 1 + 4z(m+z) = (2z+m)^2 + 1-m^2 > 0, so the integrand extends to all z.
      auto integrand = [&](double z) {
        if (std::abs(z) < 1e-5) {
          double v = 1.0 - m * m;
          return m + v * z + 2.0 * m * (m * m - 1.0) * z * z;
        }
        return (std::sqrt(1.0 + 4.0 * z * (m + z)) - 1.0) / (2.0 * z);
      };
      return 0.5 * num::adaptive_simpson(integrand, 0.0, 2.0 * beta, 1e-12, 40);
    }
    case ModelKind::Hopfield: {
      if (!(2.0 * beta < 1.0)) {
        throw DomainError("closed_form_limit: hopfield formula needs beta < 1/2");
      }
      return 0.5 * spec.lambda() * std::log(1.0 / (1.0 - 2.0 * beta));
    }
    case ModelKind::Custom:
      return std::nullopt;
  }
  return std::nullopt;
}

CouplingSample sample_coupling(const ModelSpec& spec, int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_coupling: n must be >= 2");
  if (n > kEigenCap) {
    throw std::invalid_argument("sample_coupling: n exceeds the dense-solver cap");
  }
  CouplingSample sample;
  sample.n = n;
  sample.seed = seed;
  switch (spec.kind()) {
    case ModelKind::SK:
      sample.d_values = sk_spectrum(n, seed);
      sample.expected_d = spec.measure().quantile_grid(n);
      break;
    case ModelKind::ROM: {
      int plus = static_cast<int>(std::floor(spec.p() * n));
      sample.d_values.assign(static_cast<std::size_t>(n), -1.0);
      for (int i = 0; i < plus; ++i) sample.d_values[static_cast<std::size_t>(i)] = 1.0;
      sample.expected_d = sample.d_values;
      break;
    }
    case ModelKind::Hopfield:
      sample.d_values = hopfield_spectrum(n, spec.lambda(), seed);
      sample.expected_d = spec.measure().quantile_grid(n);
      break;
    case ModelKind::Custom: {
      // Deterministic quantile spectrum; Custom carries no matrix ensemble.
      sample.d_values = spec.measure().quantile_grid(n);
      sample.expected_d = sample.d_values;
      break;
    }
  }
  return sample;
}

RigidityReport rigidity_report(const CouplingSample& sample,
                               double scaled_threshold) {
  RigidityReport r;
  if (sample.d_values.size() != sample.expected_d.size()) {
    throw std::invalid_argument("rigidity_report: length mismatch");
  }
  std::vector<double> d = sample.d_values;
  std::vector<double> e = sample.expected_d;
  std::sort(d.begin(), d.end());
  std::sort(e.begin(), e.end());
  double q = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    r.sup_norm = std::max(r.sup_norm, std::abs(d[i]));
    q += (d[i] - e[i]) * (d[i] - e[i]);
  }
  double n = static_cast<double>(d.size());
  r.w2_to_target = std::sqrt(q / n);
  r.w2_scaled = std::sqrt(n) * r.w2_to_target;
  r.passes_hint = r.w2_scaled <= scaled_threshold;
  return r;
}

double condition_c_margin(const ModelSpec& spec, double beta) {
  TransformProfile profile(limiting_measure(spec));
  return 0.25 - beta_window(profile, beta).zeta;
}

}  // namespace ogsg
