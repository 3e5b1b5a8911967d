#include "ogsg/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ogsg/numerics.hpp"

namespace ogsg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

}  // namespace

SpectralMeasure SpectralMeasure::semicircle() {
  SpectralMeasure m;
  m.kind_ = MeasureKind::Semicircle;
  m.lambda_min_ = -2.0;
  m.lambda_max_ = 2.0;
  m.mean_ = 0.0;
  m.variance_ = 1.0;
  return m;
}

SpectralMeasure SpectralMeasure::two_point(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("two_point: p must lie in (0,1)");
  }
  SpectralMeasure m;
  m.kind_ = MeasureKind::TwoPoint;
  m.param_ = p;
  m.atoms_ = {{-1.0, 1.0 - p}, {1.0, p}};
  m.lambda_min_ = -1.0;
  m.lambda_max_ = 1.0;
  m.mean_ = 2.0 * p - 1.0;
  m.variance_ = 1.0 - m.mean_ * m.mean_;
  return m;
}

SpectralMeasure SpectralMeasure::marchenko_pastur(double lambda) {
  if (!(lambda > 1.0)) {
    throw std::invalid_argument("marchenko_pastur: aspect ratio must exceed 1");
  }
  SpectralMeasure m;
  m.kind_ = MeasureKind::MarchenkoPastur;
  m.param_ = lambda;
  double s = std::sqrt(lambda);
  m.lambda_min_ = (1.0 - s) * (1.0 - s);
  m.lambda_max_ = (1.0 + s) * (1.0 + s);
  m.mean_ = lambda;
  m.variance_ = lambda;
  return m;
}

SpectralMeasure SpectralMeasure::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete: no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.weight > 0.0)) {
      throw std::invalid_argument("discrete: weights must be strictly positive");
    }
    if (!std::isfinite(a.location)) {
      throw std::invalid_argument("discrete: atom locations must be finite");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("discrete: weights must sum to 1 within 1e-12");
  }
  SpectralMeasure m;
  m.kind_ = MeasureKind::Discrete;
  m.atoms_ = std::move(atoms);
  m.lambda_min_ = m.atoms_.front().location;
  m.lambda_max_ = m.atoms_.back().location;
  double mean = 0.0;
  double second = 0.0;
  for (const Atom& a : m.atoms_) {
    mean += a.weight * a.location;
    second += a.weight * a.location * a.location;
  }
  m.mean_ = mean;
  m.variance_ = std::max(0.0, second - mean * mean);
  return m;
}

double SpectralMeasure::integrate(const std::function<double(double)>& g,
                                  double abs_tol) const {
  switch (kind_) {
    case MeasureKind::Semicircle: {
      // lambda = 2 sin t maps the density sqrt(4-x^2)/(2 pi) to (2/pi) cos^2 t.
      auto f = [&](double t) {
        double c = std::cos(t);
        return g(2.0 * std::sin(t)) * (2.0 / kPi) * c * c;
      };
      return num::adaptive_simpson(f, -kHalfPi, kHalfPi, abs_tol);
    }
    case MeasureKind::MarchenkoPastur: {
      double l = param_;
      double s = std::sqrt(l);
      auto f = [&](double t) {
        double x = 1.0 + l + 2.0 * s * std::sin(t);
        double c = std::cos(t);
        return g(x) * (2.0 * l / kPi) * c * c / x;
      };
      return num::adaptive_simpson(f, -kHalfPi, kHalfPi, abs_tol);
    }
    case MeasureKind::TwoPoint:
    case MeasureKind::Discrete: {
      double acc = 0.0;
      for (const Atom& a : atoms_) acc += a.weight * g(a.location);
      return acc;
    }
  }
  return 0.0;
}

double SpectralMeasure::cdf(double x) const {
  switch (kind_) {
    case MeasureKind::Semicircle: {
      if (x <= -2.0) return 0.0;
      if (x >= 2.0) return 1.0;
      return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * kPi) +
             std::asin(0.5 * x) / kPi;
    }
    case MeasureKind::MarchenkoPastur: {
      if (x <= lambda_min_) return 0.0;
      if (x >= lambda_max_) return 1.0;
      double l = param_;
      double s = std::sqrt(l);
      double t_end = std::asin(std::clamp((x - 1.0 - l) / (2.0 * s), -1.0, 1.0));
      auto f = [&](double t) {
        double u = 1.0 + l + 2.0 * s * std::sin(t);
        double c = std::cos(t);
        return (2.0 * l / kPi) * c * c / u;
      };
      return std::clamp(num::adaptive_simpson(f, -kHalfPi, t_end, 1e-12), 0.0, 1.0);
    }
    case MeasureKind::TwoPoint:
    case MeasureKind::Discrete: {
      double acc = 0.0;
      for (const Atom& a : atoms_) {
        if (a.location <= x) acc += a.weight;
      }
      return acc;
    }
  }
  return 0.0;
}

std::vector<double> SpectralMeasure::quantile_grid(int n) const {
  if (n < 1) throw std::invalid_argument("quantile_grid: n must be positive");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (kind_ == MeasureKind::TwoPoint || kind_ == MeasureKind::Discrete) {
    std::size_t i = 0;
    double cum = 0.0;
    for (std::size_t k = 0; k < atoms_.size() && i < out.size(); ++k) {
      cum += atoms_[k].weight;
      while (i < out.size() &&
             (static_cast<double>(i) + 0.5) / n <= cum + 1e-15) {
        out[i++] = atoms_[k].location;
      }
    }
    while (i < out.size()) out[i++] = atoms_.back().location;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    double q = (static_cast<double>(i) + 0.5) / n;
    auto f = [&](double x) { return cdf(x); };
    out[static_cast<std::size_t>(i)] =
        num::bisect_monotone(f, lambda_min_, lambda_max_, q, 1e-13, 200);
  }
  return out;
}

nlohmann::json SpectralMeasure::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case MeasureKind::Semicircle:
      j["kind"] = "semicircle";
      break;
    case MeasureKind::TwoPoint:
      j["kind"] = "two_point";
      j["p"] = param_;
      break;
    case MeasureKind::MarchenkoPastur:
      j["kind"] = "marchenko_pastur";
      j["lambda"] = param_;
      break;
    case MeasureKind::Discrete: {
      j["kind"] = "discrete";
      nlohmann::json arr = nlohmann::json::array();
      for (const Atom& a : atoms_) arr.push_back({a.location, a.weight});
      j["atoms"] = arr;
      break;
    }
  }
  return j;
}

SpectralMeasure SpectralMeasure::from_json(const nlohmann::json& j) {
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("measure: missing \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "semicircle") return semicircle();
  if (kind == "two_point") {
    if (!j.contains("p")) throw std::invalid_argument("measure: two_point needs \"p\"");
    return two_point(j["p"].get<double>());
  }
  if (kind == "marchenko_pastur") {
    if (!j.contains("lambda")) {
      throw std::invalid_argument("measure: marchenko_pastur needs \"lambda\"");
    }
    return marchenko_pastur(j["lambda"].get<double>());
  }
  if (kind == "discrete") {
    if (!j.contains("atoms") || !j["atoms"].is_array()) {
      throw std::invalid_argument("measure: discrete needs \"atoms\"");
    }
    std::vector<Atom> atoms;
    for (const auto& pair : j["atoms"]) {
      if (!pair.is_array() || pair.size() != 2) {
        throw std::invalid_argument("measure: atoms entries must be [location, weight]");
      }
      atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return discrete(std::move(atoms));
  }
  throw std::invalid_argument("measure: unknown kind \"" + kind + "\"");
}

}  // namespace ogsg
