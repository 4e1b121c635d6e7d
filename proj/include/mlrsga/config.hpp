#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlrsga/experiments.hpp"
#include "mlrsga/solvers.hpp"

namespace mlrsga {

/// Configuration or validation failure with its position in the file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string field = "");

  int line;           // 1-based; 0 when not tied to a line
  std::string field;  // dotted field path, e.g. "solver.gd.eta"
};

struct RunConfig {
  std::string game = "paper3";
  BenchmarkParams game_params;
  std::vector<std::string> solvers = {"multilrsga", "gd"};
  std::map<std::string, SolverConfig> solver_configs;
  std::optional<std::vector<double>> start;  // overrides the game's default start
  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_svg = false;
  bool dump_secant = false;
  std::uint64_t seed = 12345;

  SolverConfig solver_config(const std::string& name) const;
};

/// Parses the key-value run configuration dialect:
///   # comment
///   [game]            sections: game, run, solver.<name>
///   name = paper3     one `key = value` pair per line
/// Unknown sections, unknown keys, and malformed values raise ConfigError
/// with the offending line and field. All randomness downstream flows from
/// the single [run] seed unless a game seed is given explicitly.
RunConfig parse_run_config(const std::string& text, const std::string& filename = "<config>");

RunConfig load_run_config(const std::string& path);

}  // namespace mlrsga
