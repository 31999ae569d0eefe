#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "monotest/serialize.hpp"

namespace monotest {

inline constexpr const char* kVersion = "0.4.0";
inline constexpr const char* kOutputDirEnv = "MONOTEST_OUTPUT_DIR";

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int n = 256;
  int d = 4;
  std::optional<int> ell;
  std::optional<int> mu;
  double c = 1.0;
  std::optional<int> h;
  std::optional<double> eps;
  std::optional<double> delta;
  std::int64_t samples = 100'000;
  int workers = 1;
  bool quick = false;
  bool exact = false;
  /// "desk" or "asymptotic" scatter thresholds for pruning.
  std::string scatter = "desk";
  std::vector<int> n_grid;
  std::vector<double> gammas{0.25, 0.4};
  /// Columns i at which Lindeberg step gaps are measured, per n.
  int positions = 32;
  std::string output_dir = "monotest-out";

  /// Unknown keys and ill-typed values raise InvalidInput.
  static ExperimentConfig from_json(const json& j);
  json to_json() const;
};

/// Values filled in from the defaults when absent from the config:
/// h from c, eps = n^{4/h - 1/2}, delta = n^{-1/2}, mu = find_mu(ell).
struct DerivedParams {
  int h = 5;
  double eps = 0.0;
  double delta = 0.0;
  int ell = 3;
  int mu = 1;
  std::string ell_source = "default";
};
DerivedParams derive(const ExperimentConfig& cfg);
json to_json(const DerivedParams& p);

/// The environment variable replaces cfg.output_dir when set and nonempty.
std::filesystem::path output_dir(const ExperimentConfig& cfg);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunReport {
  std::string experiment;
  json config;
  std::vector<MetricRow> rows;
  std::vector<Check> checks;
  json details = json::object();
  double wall_seconds = 0.0;

  bool passed() const;
  json to_json() const;
};

/// Writes report.json and metrics.csv into dir.
void write_report(const RunReport& report, const std::filesystem::path& dir);

RunReport experiment_lindeberg(const ExperimentConfig& cfg);
RunReport experiment_lowerbound_sweep(const ExperimentConfig& cfg);

}  // namespace monotest
