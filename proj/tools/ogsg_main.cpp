#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ogsg/cli.hpp"

namespace {

// Accepts "a,b,c" or "start:stop:count".
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start, stop;
    int count;
    char c1, c2;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' ||
        count < 1) {
      throw CLI::ValidationError("--beta-grid", "expected start:stop:count");
    }
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? start
                               : start + (stop - start) * i / (count - 1));
    }
    return out;
  }
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ogsg: free-energy limits of orthogonally invariant mean-field spin "
      "glasses.\n"
      "CSV columns: model,n,beta,estimator,value,std_err,num_samples,seed,"
      "rng_id,model_hash,version.\n"
      "Default output directory comes from $OGSG_OUTPUT_DIR; exit codes: "
      "0 ok, 1 validation failure, 2 config error, 3 domain error."};
  app.require_subcommand(1);

  std::string model_text = R"({"kind":"sk"})";
  std::string config_path;
  std::string beta_grid_text;
  std::string n_list_text;
  std::string output_path;
  std::string format = "csv";
  double beta = -1.0;
  std::vector<double> interval;
  int n = 0;
  int num_samples = 0;
  std::uint64_t seed = 1;
  int workers = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_text, "model JSON, e.g. {\"kind\":\"rom\",\"p\":0.5}");
    cmd->add_option("--config", config_path,
                    "config JSON file; supersedes all other flags");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
    cmd->add_option("--output", output_path, "output file path");
    cmd->add_option("--format", format, "csv | json");
  };

  CLI::App* limit = app.add_subcommand("limit", "free-energy limit I(beta)");
  limit->add_option("--beta", beta, "inverse temperature");
  limit->add_option("--beta-grid", beta_grid_text, "a,b,c or start:stop:count");
  add_common(limit);

  CLI::App* variational = app.add_subcommand(
      "variational", "two-replica fixed point and psi maximization");
  variational->add_option("--beta", beta, "inverse temperature");
  variational->add_option("--beta-grid", beta_grid_text, "grid of betas");
  add_common(variational);

  CLI::App* beta0 = app.add_subcommand(
      "beta0", "replica-symmetry threshold via bisection");
  beta0->add_option("--interval", interval, "search interval: lo hi")
      ->expected(2);
  add_common(beta0);

  CLI::App* quenched = app.add_subcommand(
      "quenched", "exact-enumeration free energy over Haar draws");
  quenched->add_option("--beta", beta, "inverse temperature");
  quenched->add_option("--n", n, "system size (<= 24)");
  quenched->add_option("--num-samples", num_samples, "Haar draws");
  add_common(quenched);

  CLI::App* annealed = app.add_subcommand(
      "annealed", "Gaussian-ratio annealed moment estimators");
  annealed->add_option("--beta", beta, "inverse temperature");
  annealed->add_option("--n", n, "spectrum size");
  annealed->add_option("--num-samples", num_samples, "Monte Carlo samples");
  add_common(annealed);

  CLI::App* scan = app.add_subcommand(
      "scan", "concentration of Phi_N across Haar draws vs n");
  scan->add_option("--beta", beta, "inverse temperature");
  scan->add_option("--n-list", n_list_text, "comma list of sizes (<= 24)");
  scan->add_option("--num-samples", num_samples, "Haar draws per n");
  add_common(scan);

  CLI::App* validate = app.add_subcommand(
      "validate", "cross-check closed forms, numeric pipeline and Monte Carlo");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  ogsg::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "config error: cannot open " << config_path << "\n";
        return ogsg::kExitConfigError;
      }
      nlohmann::json j = nlohmann::json::parse(in);
      cfg = ogsg::RunConfig::from_json(j);
    } else {
      CLI::App* sub = app.get_subcommands().front();
      cfg.command = ogsg::command_from_string(sub->get_name());
      cfg.model = ogsg::ModelSpec::from_json(nlohmann::json::parse(model_text));
      if (beta >= 0.0) cfg.beta = beta;
      if (!beta_grid_text.empty()) cfg.beta_grid = parse_grid(beta_grid_text);
      if (!interval.empty()) cfg.beta_grid = interval;
      if (n > 0) cfg.n = n;
      if (!n_list_text.empty()) {
        for (double v : parse_grid(n_list_text)) {
          cfg.n_list.push_back(static_cast<int>(v));
        }
      }
      cfg.num_samples = num_samples;
      cfg.seed = seed;
      cfg.workers = workers;
      cfg.output_path = output_path;
      cfg.format = format == "json" ? ogsg::OutputFormat::Json
                                    : ogsg::OutputFormat::Csv;
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ogsg::kExitConfigError;
  }
  return ogsg::run(cfg);
}
