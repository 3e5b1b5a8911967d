#ifndef OGSG_CLI_HPP
#define OGSG_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ogsg/models.hpp"

namespace ogsg {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "OGSG_OUTPUT_DIR";

enum class Command { Limit, Variational, Beta0, Quenched, Annealed, Scan, Validate };

enum class OutputFormat { Csv, Json };

struct RunConfig {
  Command command = Command::Limit;
  ModelSpec model = ModelSpec::sk();
  std::optional<double> beta;
  std::vector<double> beta_grid;      // strictly increasing when present
  std::optional<int> n;
  std::vector<int> n_list;
  int num_samples = 0;                // 0 = per-command default
  std::uint64_t seed = 1;
  std::string output_path;            // empty = default directory rule
  OutputFormat format = OutputFormat::Csv;
  int workers = 0;                    // 0 = all cores

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

Command command_from_string(const std::string& name);
std::string command_to_string(Command c);

// Exit statuses: 0 success, 1 validation failure, 2 config error,
// 3 numerical-domain error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDomainError = 3;

// Dispatches the command, writes output files atomically, prints one summary
// line per row. Exceptions are mapped to the exit statuses above.
int run(const RunConfig& config);

// FNV-1a hash of the canonical model JSON; recorded in every output row.
std::string model_hash(const ModelSpec& spec);

}  // namespace ogsg

#endif
