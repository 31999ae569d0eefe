#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "monotest/core.hpp"

namespace monotest {

using BigInt = boost::multiprecision::cpp_int;

constexpr int kMaxMomentOrder = 15;

/// Raw moments m_1..m_K of N(mu, 1). entries[k-1] holds m_k.
struct MomentVector {
  double mu = 0.0;
  std::vector<double> entries;
  int order() const { return static_cast<int>(entries.size()); }
  /// m_k with the convention m_0 = 1.
  double at(int k) const { return k == 0 ? 1.0 : entries.at(k - 1); }
};

/// Moment matrices for odd order l = 2n+1.
struct HankelPair {
  Mat a_r;       // (n+1)x(n+1), entries m_{i+j}
  Mat a_r_plus;  // (n+1)x(n+1), entries m_{i+j+1}
  int order = 0;
};

struct PsdReport {
  double lambda_min_r = 0.0;
  double lambda_min_r_plus = 0.0;
  bool real_line_feasible = false;
  bool nonneg_feasible = false;
};

/// Finite-support random variable.
struct DiscreteRV {
  std::vector<double> atoms;  // strictly increasing
  std::vector<double> probs;
  int support_size() const { return static_cast<int>(atoms.size()); }
  double moment(int k) const;
  double negative_mass() const;
  double max_abs_atom() const;
  /// Throws InvalidInput if the invariants fail.
  void validate(double tol = 1e-12) const;
};

struct YesNoPair {
  int ell = 1;
  int mu = 1;
  DiscreteRV yes_rv;
  DiscreteRV no_rv;
};

double double_factorial(int k);  // (k)!! with (-1)!! = 0!! = 1
BigInt double_factorial_exact(int k);

MomentVector gaussian_raw_moments(double mu, int kmax);
/// Exact integer moments of N(mu,1) for integer mu, m_0..m_kmax.
std::vector<BigInt> gaussian_raw_moments_exact(long mu, int kmax);

HankelPair hankel_matrices(const MomentVector& m);
PsdReport psd_feasibility(const HankelPair& h, double rel_tol = 1e-10);

DiscreteRV build_yes_rv(int ell, int mu);

/// Feasible: any vertex of the moment LP. DeepNegative: the vertex putting the
/// negative mass as far below zero as the candidate grid allows.
enum class NoRvObjective { Feasible, DeepNegative };

struct NoRvOptions {
  int grid = 200;
  int max_rounds = 6;
  NoRvObjective objective = NoRvObjective::DeepNegative;
};
DiscreteRV build_no_rv(int ell, int mu, const NoRvOptions& opt = {});

int find_mu(int ell, int cap = 0);
YesNoPair build_pair(int ell, int mu = 0);

/// Largest relative error |E[rv^k] - m_k| / |m_k| over k = 1..ell.
double max_relative_moment_error(const DiscreteRV& rv, const MomentVector& m);

BigInt det_b(int ell);
BigInt det_bareiss(std::vector<std::vector<BigInt>> a);

struct TruncationGap {
  double gap = 0.0;
  double bound = 0.0;
};
TruncationGap truncation_moment_gap(double mu, int k);

/// Integer sandwich for the order-(2l+1) shifted moment matrix at integer mu.
struct SingularSandwich {
  BigInt det;
  double sigma_max = 0.0;
  double frobenius = 0.0;
  double sigma_bound = 0.0;
  bool holds = false;
};
SingularSandwich singular_value_sandwich(int ell, long mu);

}  // namespace monotest
