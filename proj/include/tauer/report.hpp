#pragma once

// Batch scenario runner behind the `tauer` command line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tauer/tower.hpp"

namespace tauer {

/// Raised for invalid scenarios; the runner maps it to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  int depth = 3;
  int level = 2;
  /// A level number ("2") or an explicit comma-separated list ("0,1/2,5/6").
  /// Unset means the full grid at `level`.
  std::optional<std::string> grid;
  int probes = 8;
  int iterations = 500;
  int samples = 100;
  std::uint64_t seed = 1;
  std::filesystem::path out = "tauer_out";
  /// Threshold for claims that hold with exact zero.
  double tolerance = 1e-10;
  int threads = 0;
};

/// Default output directory: $TAUER_OUT when set, else ./tauer_out.
std::filesystem::path default_output_dir();

/// Applies one `key = value` assignment. Keys: depth, level, grid, probes,
/// iters, samples, seed, out, tol, threads.
void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines; `#` starts a comment.
void load_config_file(ScenarioConfig& config, const std::filesystem::path& path);

/// Checks depth/level bounds and resolves the parameter grid. Throws
/// ConfigError on any violation, including an empty grid.
std::vector<TowerRational> resolve_grid(const ScenarioConfig& config, const PrimeTower& tower);

inline constexpr const char* kSubcommands[] = {"tower",     "family",  "approximant",
                                               "distances", "certify", "gamma"};

/// Runs one subcommand. Returns 0 when every check passes, 1 when a check
/// fails (the failing record goes to err), 2 on configuration errors.
int run(const std::string& subcommand, const ScenarioConfig& config, std::ostream& out,
        std::ostream& err);

}  // namespace tauer
