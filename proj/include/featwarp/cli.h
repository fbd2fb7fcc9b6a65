#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "featwarp/csv.h"
#include "featwarp/serialize.h"
#include "featwarp/synth.h"

namespace featwarp {

struct WarperConfig {
  WarperKind kind = WarperKind::Identity;
  std::string anchor;
  // Path warpers.
  PathKind path_kind = PathKind::ClusterLine;
  std::size_t clusters = 2;
  std::size_t from_center = 0;
  std::size_t to_center = 1;
  std::map<std::string, double> weights;
  std::map<std::string, double> from;
  std::map<std::string, double> to;
};

struct ModelConfig {
  std::string kind = "random-forest";  // or "linear"
  ForestParams forest;
  bool seed_given = false;
  // Load a serialized model instead of fitting one.
  std::optional<std::filesystem::path> path;
};

struct ImportanceConfig {
  std::optional<Loss> loss;  // default: log-loss for classification, mse otherwise
  std::size_t n_permutations = 20;
  std::size_t top_k = 10;
  std::size_t workers = 0;   // 0: hardware concurrency
};

struct DiagnosticsConfig {
  // Unset: every warped feature.
  std::optional<std::vector<std::string>> ale;
  std::vector<std::string> pdp;
  std::vector<std::pair<std::string, std::string>> ale_2d;
  std::vector<std::pair<std::string, std::string>> pdp_2d;
  std::size_t bins = 20;
  GridSpec grid;
  ImportanceConfig importance;
};

/// One experiment. Relative paths are resolved against the config file's directory.
struct RunConfig {
  std::optional<std::filesystem::path> data;
  TargetSpec target{"label", std::string("1"), std::nullopt};
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  WarperConfig warper;
  ModelConfig model;
  DiagnosticsConfig diagnostics;
  // Feature subsets for train: name -> columns. Empty: one run per group.
  std::vector<std::pair<std::string, std::vector<std::string>>> subsets;
  SurrogateSpec synth;
  std::filesystem::path output = "featwarp-out";
  std::uint64_t seed = 1;
};

// Throws Error(ConfigError) on malformed documents.
RunConfig parse_run_config(const Json& doc, const std::filesystem::path& base_dir);

/// Entry point of the command-line tool; returns the process exit code
/// (0 ok, 2 config, 3 data, 4 numeric).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace featwarp
