#include "ogsg/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "ogsg/montecarlo.hpp"
#include "ogsg/numerics.hpp"
#include "ogsg/rng.hpp"
#include "ogsg/transforms.hpp"
#include "ogsg/variational.hpp"

namespace ogsg {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Row {
  std::string estimator;
  double value = 0.0;
  double std_err = 0.0;
  int n = 0;
  double beta = 0.0;
  int num_samples = 0;
};

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');  // RFC 4180: double embedded quotes
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void atomic_write(const std::string& path, const std::string& contents) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp);
    out << contents;
  }
  std::filesystem::rename(tmp, target);
}

std::string default_output_path(const RunConfig& cfg) {
  if (!cfg.output_path.empty()) return cfg.output_path;
  const char* dir = std::getenv(kOutputDirEnv);
  std::string base = dir ? std::string(dir) : std::string(".");
  std::string ext = cfg.format == OutputFormat::Csv ? ".csv" : ".json";
  return base + "/ogsg_" + command_to_string(cfg.command) + ext;
}

}  // namespace

std::string model_hash(const ModelSpec& spec) {
  const std::string dump = spec.to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Command command_from_string(const std::string& name) {
  if (name == "limit") return Command::Limit;
  if (name == "variational") return Command::Variational;
  if (name == "beta0") return Command::Beta0;
  if (name == "quenched") return Command::Quenched;
  if (name == "annealed") return Command::Annealed;
  if (name == "scan") return Command::Scan;
  if (name == "validate") return Command::Validate;
  throw std::invalid_argument("unknown command \"" + name + "\"");
}

std::string command_to_string(Command c) {
  switch (c) {
    case Command::Limit: return "limit";
    case Command::Variational: return "variational";
    case Command::Beta0: return "beta0";
    case Command::Quenched: return "quenched";
    case Command::Annealed: return "annealed";
    case Command::Scan: return "scan";
    case Command::Validate: return "validate";
  }
  return "?";
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command_to_string(command);
  j["model"] = model.to_json();
  if (beta) j["beta"] = *beta;
  if (!beta_grid.empty()) j["beta_grid"] = beta_grid;
  if (n) j["n"] = *n;
  if (!n_list.empty()) j["n_list"] = n_list;
  if (num_samples > 0) j["num_samples"] = num_samples;
  j["seed"] = seed;
  if (!output_path.empty()) j["output"] = output_path;
  j["format"] = format == OutputFormat::Csv ? "csv" : "json";
  if (workers > 0) j["workers"] = workers;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (!j.contains("command")) throw std::invalid_argument("config: missing \"command\"");
  cfg.command = command_from_string(j["command"].get<std::string>());
  if (j.contains("model")) cfg.model = ModelSpec::from_json(j["model"]);
  if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
  if (j.contains("beta_grid")) {
    cfg.beta_grid = j["beta_grid"].get<std::vector<double>>();
  }
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("n_list")) cfg.n_list = j["n_list"].get<std::vector<int>>();
  if (j.contains("num_samples")) cfg.num_samples = j["num_samples"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
  if (j.contains("format")) {
    const std::string f = j["format"].get<std::string>();
    if (f == "csv") cfg.format = OutputFormat::Csv;
    else if (f == "json") cfg.format = OutputFormat::Json;
    else throw std::invalid_argument("config: format must be \"csv\" or \"json\"");
  }
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  return cfg;
}

namespace {

void validate_config(const RunConfig& cfg) {
  for (std::size_t i = 1; i < cfg.beta_grid.size(); ++i) {
    if (!(cfg.beta_grid[i] > cfg.beta_grid[i - 1])) {
      throw std::invalid_argument("config: beta_grid must be strictly increasing");
    }
  }
  auto need_beta = [&]() {
    if (!cfg.beta && cfg.beta_grid.empty()) {
      throw std::invalid_argument("config: field \"beta\" (or \"beta_grid\") is required");
    }
  };
  switch (cfg.command) {
    case Command::Limit:
      need_beta();
      break;
    case Command::Variational:
      need_beta();
      break;
    case Command::Beta0:
      if (cfg.beta_grid.size() < 2) {
        throw std::invalid_argument(
            "config: beta0 needs \"beta_grid\" with the search interval endpoints");
      }
      break;
    case Command::Quenched:
      need_beta();
      if (!cfg.n) throw std::invalid_argument("config: field \"n\" is required");
      if (*cfg.n > kEnumerationCap) {
        throw std::invalid_argument("config: field \"n\" exceeds the enumeration cap 24");
      }
      break;
    case Command::Annealed:
      need_beta();
      if (!cfg.n) throw std::invalid_argument("config: field \"n\" is required");
      break;
    case Command::Scan:
      need_beta();
      if (cfg.n_list.empty()) {
        throw std::invalid_argument("config: field \"n_list\" is required");
      }
      for (int n : cfg.n_list) {
        if (n > kEnumerationCap) {
          throw std::invalid_argument("config: n_list exceeds the enumeration cap 24");
        }
      }
      break;
    case Command::Validate:
      break;
  }
}

std::vector<double> betas_of(const RunConfig& cfg) {
  if (!cfg.beta_grid.empty()) return cfg.beta_grid;
  return {cfg.beta.value()};
}

void emit(const RunConfig& cfg, const std::vector<Row>& rows,
          const nlohmann::json& extra) {
  const std::string model_json = cfg.model.to_json().dump();
  const std::string hash = model_hash(cfg.model);

  nlohmann::json manifest;
  manifest["config"] = cfg.to_json();
  manifest["model_hash"] = hash;
  manifest["rng_id"] = kRngId;
  manifest["version"] = kArtifactVersion;
  manifest["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  if (!extra.is_null()) manifest["details"] = extra;

  for (const Row& r : rows) {
    std::cout << command_to_string(cfg.command) << " model=" << cfg.model.name()
              << " n=" << r.n << " beta=" << fmt(r.beta)
              << " estimator=" << r.estimator << " value=" << fmt(r.value)
              << " std_err=" << fmt(r.std_err) << "\n";
  }

  const std::string path = default_output_path(cfg);
  if (cfg.format == OutputFormat::Csv) {
    std::string csv =
        "model,n,beta,estimator,value,std_err,num_samples,seed,rng_id,"
        "model_hash,version\n";
    for (const Row& r : rows) {
      csv += csv_quote(model_json) + "," + std::to_string(r.n) + "," +
             fmt(r.beta) + "," + r.estimator + "," + fmt(r.value) + "," +
             fmt(r.std_err) + "," + std::to_string(r.num_samples) + "," +
             std::to_string(cfg.seed) + "," + kRngId + "," + hash + "," +
             kArtifactVersion + "\n";
    }
    atomic_write(path, csv);
    atomic_write(path + ".manifest.json", manifest.dump(2) + "\n");
  } else {
    nlohmann::json out = manifest;
    nlohmann::json jrows = nlohmann::json::array();
    for (const Row& r : rows) {
      jrows.push_back({{"model", cfg.model.to_json()},
                       {"n", r.n},
                       {"beta", r.beta},
                       {"estimator", r.estimator},
                       {"value", r.value},
                       {"std_err", r.std_err},
                       {"num_samples", r.num_samples},
                       {"seed", cfg.seed},
                       {"rng_id", kRngId},
                       {"model_hash", hash},
                       {"version", kArtifactVersion}});
    }
    out["rows"] = jrows;
    atomic_write(path, out.dump(2) + "\n");
  }
}

int run_limit(const RunConfig& cfg) {
  std::vector<Row> rows;
  TransformProfile profile(limiting_measure(cfg.model));
  for (double beta : betas_of(cfg)) {
    auto closed = closed_form_limit(cfg.model, beta);
    double value = closed ? *closed : free_energy_limit(profile, beta);
    rows.push_back({"limit", value, 0.0, 0, beta, 0});
  }
  emit(cfg, rows, nullptr);
  return kExitOk;
}

int run_variational(const RunConfig& cfg) {
  RateFunction rf((TransformProfile(limiting_measure(cfg.model))));
  std::vector<Row> rows;
  nlohmann::json details = nlohmann::json::array();
  for (double beta : betas_of(cfg)) {
    VariationalSolution fp = solve_fixed_point(rf, beta);
    VariationalSolution mx = maximize_psi(rf, beta, cfg.workers);
    if (!fp.contraction_certified) {
      std::cerr << "warning: contraction bound not certified at beta=" << beta
                << "; iteration attempted anyway\n";
    }
    rows.push_back({"psi_max", mx.psi_value, 0.0, 0, beta, 0});
    rows.push_back({"x_star", mx.x_star, 0.0, 0, beta, 0});
    rows.push_back({"y_star", mx.y_star, 0.0, 0, beta, 0});
    rows.push_back({"fixed_point_x", fp.x_star, 0.0, 0, beta, 0});
    details.push_back({{"beta", beta},
                       {"fixed_point", fp.to_json()},
                       {"maximizer", mx.to_json()}});
  }
  emit(cfg, rows, details);
  return kExitOk;
}

int run_beta0(const RunConfig& cfg) {
  RateFunction rf((TransformProfile(limiting_measure(cfg.model))));
  double lo = cfg.beta_grid.front();
  double hi = cfg.beta_grid.back();
  double b0 = beta_zero(rf, lo, hi, 1e-3, cfg.workers);
  std::vector<Row> rows{{"beta_zero", b0, 0.0, 0, 0.0, 0}};
  emit(cfg, rows, nullptr);
  return kExitOk;
}

int run_quenched(const RunConfig& cfg) {
  int samples = cfg.num_samples > 0 ? cfg.num_samples : 50;
  std::vector<Row> rows;
  for (double beta : betas_of(cfg)) {
    QuenchedEstimate est = quenched_free_energy(cfg.model, *cfg.n, beta,
                                                samples, cfg.seed, cfg.workers);
    rows.push_back({"phi_quenched", est.mean, est.std_err, est.n, beta, samples});
    rows.push_back({"phi_quenched_expected", est.mean_expected,
                    est.std_err_expected, est.n, beta, samples});
  }
  emit(cfg, rows, nullptr);
  return kExitOk;
}

int run_annealed(const RunConfig& cfg) {
  int samples = cfg.num_samples > 0 ? cfg.num_samples : 100000;
  std::vector<Row> rows;
  for (double beta : betas_of(cfg)) {
    AnnealedEstimate est = annealed_moments(limiting_measure(cfg.model), *cfg.n,
                                            beta, samples, cfg.seed, cfg.workers);
    rows.push_back({"annealed_rate1", est.log_first_moment_rate,
                    est.std_err_first, est.n, beta, samples});
    rows.push_back({"annealed_rate2", est.log_second_moment_rate,
                    est.std_err_second, est.n, beta, samples});
  }
  emit(cfg, rows, nullptr);
  return kExitOk;
}

int run_scan(const RunConfig& cfg) {
  int samples = cfg.num_samples > 0 ? cfg.num_samples : 200;
  double beta = betas_of(cfg).front();
  auto table = concentration_scan(cfg.model, beta, cfg.n_list, samples,
                                  cfg.seed, cfg.workers);
  std::vector<Row> rows;
  for (const auto& r : table) {
    rows.push_back({"phi_mean", r.mean, 0.0, r.n, beta, r.num_samples});
    rows.push_back({"phi_std", r.std_dev, r.std_err_of_std, r.n, beta,
                    r.num_samples});
  }
  emit(cfg, rows, nullptr);
  return kExitOk;
}

int run_validate(const RunConfig& cfg) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  struct Family {
    const char* label;
    ModelSpec spec;
    double beta_cap;  // strict upper bound for the test grid
  };
  const Family families[] = {
      {"sk", ModelSpec::sk(), 0.5},
      {"rom(0.5)", ModelSpec::rom(0.5), 0.45},
      {"hopfield(2)", ModelSpec::hopfield(2.0), 0.5 / (1.0 + std::sqrt(2.0))},
  };

  for (const auto& fam : families) {
    TransformProfile closed(limiting_measure(fam.spec), RMode::ClosedForm);
    TransformProfile numeric(limiting_measure(fam.spec), RMode::NumericInversion);
    bool ok = true;
    for (double f : {0.2, 0.5, 0.8}) {
      double beta = f * fam.beta_cap;
      double a = closed_form_limit(fam.spec, beta).value();
      double b = free_energy_limit(numeric, beta);
      if (std::abs(a - b) >= 1e-8) ok = false;
    }
    check(std::string("closed form vs numeric inversion: ") + fam.label, ok);

    RateFunction rf{TransformProfile(limiting_measure(fam.spec))};
    bool id_ok = true;
    for (double f : {0.2, 0.5, 0.8}) {
      double beta = f * fam.beta_cap;
      double a = r_transform(closed, 2.0 * beta);
      double lhs = beta * a - rate_function(rf, a);
      double i = closed_form_limit(fam.spec, beta).value();
      if (std::abs(lhs - i) >= 1e-8) id_ok = false;
    }
    check(std::string("variational identity: ") + fam.label, id_ok);
  }

  {
    RateFunction rf{TransformProfile(SpectralMeasure::semicircle())};
    VariationalSolution s = solve_fixed_point(rf, 0.2);
    check("sk fixed point at beta=0.2",
          std::abs(s.x_star - 0.4) < 1e-11 && std::abs(s.y_star - 0.4) < 1e-11);
  }
  {
    QuenchedEstimate q = quenched_free_energy(ModelSpec::sk(), 12, 0.3, 30,
                                              cfg.seed, cfg.workers);
    check("quenched sk n=12 near closed form", std::abs(q.mean - 0.09) < 0.05);
  }
  {
    AnnealedEstimate a = annealed_moments(SpectralMeasure::semicircle(), 500,
                                          0.3, 20000, cfg.seed, cfg.workers);
    check("annealed sk n=500 near closed form",
          std::abs(a.log_first_moment_rate - 0.09) < 0.02);
  }
  {
    HaarSample o = sample_haar(16, cfg.seed);
    double res = (o.matrix * o.matrix.transpose() -
                  Eigen::MatrixXd::Identity(16, 16))
                     .cwiseAbs()
                     .maxCoeff();
    check("haar orthogonality", res < 1e-12);
  }
  return failures == 0 ? kExitOk : kExitValidationFailure;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    validate_config(config);
    switch (config.command) {
      case Command::Limit: return run_limit(config);
      case Command::Variational: return run_variational(config);
      case Command::Beta0: return run_beta0(config);
      case Command::Quenched: return run_quenched(config);
      case Command::Annealed: return run_annealed(config);
      case Command::Scan: return run_scan(config);
      case Command::Validate: return run_validate(config);
    }
    return kExitConfigError;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const num::NoConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const NoTransitionError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace ogsg
