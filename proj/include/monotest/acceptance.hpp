#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "monotest/instances.hpp"

namespace monotest {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Fewer Lindeberg column positions; every stated sample size is kept.
  bool quick = false;
  std::uint64_t seed = 1;
  int workers = 1;
};

constexpr int kCriterionCount = 14;

CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});
std::string format_result(const CriterionResult& r);

/// Seeded pruning corpus at n = 64: random sets and sets clustered near the
/// span of two or three points, all with at most 48 rows.
std::vector<CubePointSet> pruning_corpus(std::uint64_t seed, int count = 20);

}  // namespace monotest
