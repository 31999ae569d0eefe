#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/rational.hpp>

#include "monotest/core.hpp"
#include "monotest/instances.hpp"

namespace monotest {

constexpr int kMaxExactDimension = 20;

/// Values of f on {-1,1}^n. Index bit j is 1 iff x_j = +1.
struct TruthTable {
  int n = 0;
  std::vector<std::int8_t> values;  // +-1

  static TruthTable from_ltf(const LTF& f);
  static TruthTable from_function(int n, const std::function<int(std::uint64_t)>& f);
  std::size_t size() const { return values.size(); }
};

struct SpectralSummary {
  Vec fourier1;
  Vec hermite1;
  double tau = 0.0;
};

bool is_monotone(const TruthTable& t);
boost::rational<std::int64_t> exact_distance_to_monotone(const TruthTable& t);
Vec fourier_degree1(const TruthTable& t);
/// Sampled f-hat(i) with per-coordinate standard errors.
std::vector<Estimate> fourier_degree1_sampled(const LTF& f, std::int64_t samples, Rng& rng);
Vec hermite_degree1(const LTF& f);
double regularity(const LTF& f);
double fourier_negative_mass(const TruthTable& t);
double fourier_negative_mass(const Vec& fourier1);
SpectralSummary spectral_summary(const TruthTable& t, const LTF& f);

struct EdgeTestResult {
  bool accept = true;
  std::int64_t first_hit = -1;  // round of the first violation, -1 if none
  std::int64_t violations = 0;
  std::int64_t rounds = 0;
};

using CubeOracle = std::function<int(const Eigen::VectorXi&)>;
EdgeTestResult edge_tester(const CubeOracle& oracle, int n, std::int64_t q, Rng& rng);

}  // namespace monotest
