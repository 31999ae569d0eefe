#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "monotest/core.hpp"
#include "monotest/instances.hpp"
#include "monotest/mollifier.hpp"

namespace monotest {

/// Unscaled coefficient sums within this distance of zero count as zero
/// (and so map to +1), which keeps exact and sampled pattern maps consistent.
constexpr double kZeroSnap = 1e-9;

std::vector<int> sign_pattern(const Eigen::Ref<const Vec>& v);
/// Bit i set iff v_i >= -snap. Requires d <= 64.
std::uint64_t pattern_key(const Eigen::Ref<const Vec>& v, double snap = 0.0);
std::vector<int> key_to_pattern(std::uint64_t key, int d);

struct SignPatternDistribution {
  int d = 0;
  std::unordered_map<std::uint64_t, double> mass;
  double total() const;
};

double total_variation(const SignPatternDistribution& p, const SignPatternDistribution& q);

enum class DuoMethod { Exact, MonteCarlo };
std::string to_string(DuoMethod m);

struct DuoEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  DuoMethod method = DuoMethod::Exact;
  std::int64_t samples = 0;
  double bias_bound = 0.0;          // additive plug-in bias bound sqrt(2^d / samples), capped at 1
  std::string stderr_method = "none";  // none | bootstrap | delta
};

struct MonteCarloOptions {
  int bootstrap = 200;
  int workers = 1;
  /// Above this many (patterns x resamples) the bootstrap falls back to the
  /// delta-method standard error.
  std::int64_t bootstrap_budget = 50'000'000;
};

constexpr double kExactEnumerationGuard = 1e7;

SignPatternDistribution exact_pattern_distribution(const QueryMatrix& qm, const DiscreteRV& rv);
DuoEstimate duo_exact_small(const QueryMatrix& qm, const YesNoPair& pair);

using PatternCounts = std::unordered_map<std::uint64_t, std::int64_t>;
PatternCounts sample_pattern_counts(const QueryMatrix& qm, const DiscreteRV& rv, std::int64_t samples, Rng rng,
                                    int workers = 1);
DuoEstimate duo_from_counts(const PatternCounts& s, const PatternCounts& t, std::int64_t samples, int d, Rng rng,
                            const MonteCarloOptions& opt = {});
DuoEstimate duo_monte_carlo(const QueryMatrix& qm, const YesNoPair& pair, std::int64_t samples, Rng rng,
                            const MonteCarloOptions& opt = {});

/// Union of orthants where the pilot estimate of P_S exceeds that of P_T.
std::vector<std::uint64_t> pilot_union(const QueryMatrix& qm, const YesNoPair& pair, std::int64_t samples, Rng rng);

/// E[Psi(sum_j w_j X^(j))] with w_j ~ rv.
Estimate psi_expectation(const QueryMatrix& qm, const DiscreteRV& rv, const OrthantMollifier& psi,
                         std::int64_t samples, Rng rng, int workers = 1);

/// |E Psi(Q^(i-1)) - E Psi(Q^(i))|, estimated by averaging Psi exactly over the
/// atoms of u and v at column i given R_{-i}. value holds the absolute mean.
Estimate lindeberg_step_gap(const QueryMatrix& qm, const YesNoPair& pair, const OrthantMollifier& psi, int i,
                            std::int64_t samples, Rng rng, int workers = 1);

struct AnticoncentrationParams {
  double eps = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  static AnticoncentrationParams defaults(int n, int h, const YesNoPair& pair);
};

/// Pr[(R_{-i})|_I in [-eps-beta*delta, eps+beta*delta]^{|I|}].
Estimate anticoncentration_probe(const QueryMatrix& qm, const YesNoPair& pair, const std::vector<int>& rows,
                                 const AnticoncentrationParams& params, int i, std::int64_t samples, Rng rng);

/// Pr[G in [lo, hi]] for G Gaussian with mean mu * A 1 and covariance A A^T.
Estimate gaussian_box_prob(const Mat& a_rows, double mu, const Vec& lo, const Vec& hi, std::int64_t samples,
                           Rng rng);

}  // namespace monotest
