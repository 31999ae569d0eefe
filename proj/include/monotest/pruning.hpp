#pragma once

#include <string>
#include <vector>

#include "monotest/core.hpp"
#include "monotest/geometry.hpp"
#include "monotest/instances.hpp"
#include "monotest/orthants.hpp"

namespace monotest {

struct ScatterParams {
  int h = 3;
  double eps = 1.0;
  /// Scatteredness threshold r |X| log^p n.
  double scatter_log_power = 5.0;
  /// Right side (r + eps) log^p n of the cover/remove coordinate-sum check.
  double sum_check_log_power = 2.0;
  /// If positive, replaces the realized gamma1 used for compatibility.
  double gamma1_override = 0.0;
  std::int64_t exhaustive_budget = 2'000'000;
  int sampled_per_size = 10'000;
  std::uint64_t seed = 0;

  /// eps = n^{4/h - 1/2} with the log powers of the definitions.
  static ScatterParams asymptotic(int n, int h);
  /// Same eps, scatteredness threshold r |X| (log power 0).
  static ScatterParams desk(int n, int h);
};

struct PartitionResult {
  std::vector<int> cover, remove, incomp;  // row indices into x
  std::vector<std::pair<int, int>> close_pairs;  // (cover, remove) within 4r
  double r = 0.0;
  double gamma1 = 1.0;
  CubePointSet a;
};

/// Removes duplicate rows, keeping first occurrences. `kept` receives the
/// original indices of the surviving rows.
CubePointSet deduplicate(const CubePointSet& x, std::vector<int>* kept = nullptr);

/// Partition of R = (X cap B(span A, r)) \ A. Rows of x equal to a row of a are
/// excluded from R.
PartitionResult partition_r(const CubePointSet& x, const CubePointSet& a, double r, const ScatterParams& params);

struct ScatterViolation {
  std::vector<int> a;  // row indices into the deduplicated set
  double r = 0.0;
  int remove = 0;
  double threshold = 0.0;
};

struct ScatterReport {
  bool scattered = true;
  std::vector<ScatterViolation> violations;  // maximal violating r per subset
  std::string mode = "exhaustive";
  std::int64_t subsets_checked = 0;
  double subsets_total = 0;
};

ScatterReport is_scattered(const CubePointSet& x, int h, const ScatterParams& params);

struct PruneStep {
  std::vector<int> a;        // original row indices
  double r = 0.0;
  std::vector<int> removed;  // original row indices
  int size_before = 0;
};

struct PruneTrace {
  int initial_size = 0;
  int duplicates_removed = 0;
  int final_size = 0;
  std::vector<PruneStep> steps;
  std::vector<int> kept;  // original indices of the surviving rows
  double radius_sum() const;
  /// sum_i removed_i / size_i
  double telescoping_sum() const;
};

struct PruneOutput {
  CubePointSet pruned;
  PruneTrace trace;
};
PruneOutput prune(const CubePointSet& x, int h, const ScatterParams& params);

struct DriftResult {
  DuoEstimate before, after;
  double drift = 0.0;
  double combined_stderr = 0.0;
};
/// Common-random-number estimate of d_UO on x and on the sub-multiset pruned_x.
DriftResult duo_drift_check(const CubePointSet& x, const CubePointSet& pruned_x, const YesNoPair& pair,
                            std::int64_t samples, Rng rng, const MonteCarloOptions& opt = {});

/// Probability that S gives different signs to some (cover, remove) pair.
Estimate bad_orthant_mass(const CubePointSet& x, const std::vector<std::pair<int, int>>& pairs,
                          const DiscreteRV& rv, std::int64_t samples, Rng rng);

}  // namespace monotest
