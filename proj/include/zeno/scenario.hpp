#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zeno/dynamics.hpp"

namespace zeno {

struct InitialCondition {
  bool mixed = false;
  int level = 0;  // used when !mixed
};

struct TrajectoryConfig {
  int n_traj = 1000;
  std::uint64_t seed = 0;
  std::optional<double> dark_threshold;  // default: 10 / Gamma_max
  int n_samples = 201;
};

/// Run description loaded from JSON. omega and gamma may be scalars or lists;
/// lists expand into the cross product omega x gamma.
struct ScenarioConfig {
  std::string model = "two_level";
  double xi = 1.0;
  std::vector<double> omega{0.0};
  bool omega_is_list = false;
  std::vector<double> gamma{0.0};
  bool gamma_is_list = false;
  std::vector<double> gamma_channels;
  std::optional<double> t_max;  // default 20 / xi
  int n_points = 2000;
  InitialCondition initial;
  SolverTolerances solver;
  std::string engine = "master";  // master | rate
  bool prune = true;
  std::optional<TrajectoryConfig> trajectories;
  std::string output = "out/run";

  double effective_t_max() const;
  /// Cross product of omega and gamma, omega-major.
  std::vector<std::pair<double, double>> sweep_points() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses and validates a JSON document. Unknown keys, wrong types and
/// malformed JSON raise ConfigError; syntax errors carry line and column.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& config);

enum class Mode { simulate, derive, steady, analyze, traject };
std::string_view to_string(Mode mode);

struct RunResult {
  std::vector<std::filesystem::path> files;  // data files, manifest excluded
  std::filesystem::path manifest;
};

/// Executes one mode and writes its CSV outputs followed by
/// `<output>_<mode>_manifest.json`. Human-readable summaries go to `log`.
/// On NumericalError every file written so far is removed before rethrowing.
RunResult run_scenario(const ScenarioConfig& config, Mode mode, std::ostream& log, int threads = 1);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form used in file names ("10", "0.5").
std::string format_value(double v);

}  // namespace zeno
