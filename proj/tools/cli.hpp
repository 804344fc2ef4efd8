#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "landuse/mapgen.hpp"
#include "landuse/pipeline.hpp"

namespace landuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitRuntime = 3;

inline constexpr const char* kVersion = "0.3.0";

/// Knobs shared by every subcommand. Paths in a config file are resolved
/// against the directory holding it.
struct Config {
  std::string regions;
  std::string photos;
  std::string inout;
  std::string keywords;
  std::string features;
  std::string output_dir;

  std::uint64_t seed = 42;
  double fraction = 0.2;
  std::size_t target = 3000;
  std::vector<double> C_grid = learn::default_C_grid();
  double tol = 0.1;
  std::uint32_t folds = 5;
  std::uint32_t max_iter = 1000;
  unsigned threads = 1;
  mapgen::MapStyle style;

  pipeline::TrainConfig train_config() const { return {C_grid, tol, max_iter, folds, seed, threads}; }
};

/// Throws Error{Malformed} for an invalid document.
Config parse_config(const std::string& json_text, const std::string& base_dir);
Config load_config(const std::string& path);

/// Entry point behind the `landuse` executable. Logs go to stderr; data only
/// to the output files named by flags or the config.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace landuse::cli
