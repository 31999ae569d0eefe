#include "monotest/momentlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "monotest/lp.hpp"

namespace monotest {

using LD = long double;
using VecL = VecT<LD>;
using MatL = MatT<LD>;

namespace {

void check_odd_order(int ell) {
  if (ell < 1 || ell % 2 == 0) throw InvalidInput("moment order must be odd and >= 1, got " + std::to_string(ell));
  if (ell > kMaxMomentOrder)
    throw ResourceGuard("moment order " + std::to_string(ell) + " exceeds cap " + std::to_string(kMaxMomentOrder));
}

// Central moments of N(0,1): 0 for odd k, (k-1)!! for even k.
LD std_normal_moment(int k) {
  if (k % 2 == 1) return 0;
  LD r = 1;
  for (int j = k - 1; j > 1; j -= 2) r *= j;
  return r;
}

LD raw_moment_ld(LD mu, int k) {
  LD s = 0;
  for (int j = 0; 2 * j <= k; ++j)
    s += static_cast<LD>(boost::math::binomial_coefficient<double>(k, 2 * j)) * std_normal_moment(2 * j) *
         std::pow(mu, static_cast<LD>(k - 2 * j));
  return s;
}

}  // namespace

double double_factorial(int k) {
  double r = 1;
  for (int j = k; j > 1; j -= 2) r *= j;
  return r;
}

BigInt double_factorial_exact(int k) {
  BigInt r = 1;
  for (int j = k; j > 1; j -= 2) r *= j;
  return r;
}

double DiscreteRV::moment(int k) const {
  LD s = 0;
  for (size_t i = 0; i < atoms.size(); ++i) s += static_cast<LD>(probs[i]) * std::pow(static_cast<LD>(atoms[i]), k);
  return static_cast<double>(s);
}

double DiscreteRV::negative_mass() const {
  double s = 0;
  for (size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i] < 0) s += probs[i];
  return s;
}

double DiscreteRV::max_abs_atom() const {
  double b = 0;
  for (double a : atoms) b = std::max(b, std::abs(a));
  return b;
}

void DiscreteRV::validate(double tol) const {
  if (atoms.empty() || atoms.size() != probs.size()) throw InvalidInput("DiscreteRV: atoms/probs size mismatch");
  double total = 0;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (!(probs[i] >= 0)) throw InvalidInput("DiscreteRV: negative probability");
    if (i > 0 && !(atoms[i] > atoms[i - 1])) throw InvalidInput("DiscreteRV: atoms not strictly increasing");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > tol) throw InvalidInput("DiscreteRV: probabilities do not sum to 1");
}

MomentVector gaussian_raw_moments(double mu, int kmax) {
  if (kmax < 1) throw InvalidInput("kmax must be >= 1");
  MomentVector m;
  m.mu = mu;
  m.entries.resize(kmax);
  for (int k = 1; k <= kmax; ++k) m.entries[k - 1] = static_cast<double>(raw_moment_ld(mu, k));
  return m;
}

std::vector<BigInt> gaussian_raw_moments_exact(long mu, int kmax) {
  std::vector<BigInt> out(kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    BigInt s = 0;
    for (int j = 0; 2 * j <= k; ++j) {
      BigInt binom = 1;
      for (int t = 0; t < 2 * j; ++t) binom = binom * (k - t) / (t + 1);
      BigInt p = 1;
      for (int t = 0; t < k - 2 * j; ++t) p *= mu;
      s += binom * double_factorial_exact(2 * j - 1) * p;
    }
    out[k] = s;
  }
  return out;
}

HankelPair hankel_matrices(const MomentVector& m) {
  const int ell = m.order();
  if (ell % 2 == 0) throw InvalidInput("hankel_matrices: order must be odd, got " + std::to_string(ell));
  const int size = (ell - 1) / 2 + 1;
  HankelPair h;
  h.order = ell;
  h.a_r.resize(size, size);
  h.a_r_plus.resize(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      h.a_r(i, j) = m.at(i + j);
      h.a_r_plus(i, j) = m.at(i + j + 1);
    }
  return h;
}

PsdReport psd_feasibility(const HankelPair& h, double rel_tol) {
  auto lam = [&](const Mat& a) {
    MatL al = a.cast<LD>();
    Eigen::SelfAdjointEigenSolver<MatL> es(al, Eigen::EigenvaluesOnly);
    LD lo = es.eigenvalues().minCoeff();
    LD smax = es.eigenvalues().cwiseAbs().maxCoeff();
    return std::make_pair(static_cast<double>(lo), static_cast<double>(smax));
  };
  PsdReport r;
  auto [l1, s1] = lam(h.a_r);
  auto [l2, s2] = lam(h.a_r_plus);
  r.lambda_min_r = l1;
  r.lambda_min_r_plus = l2;
  r.real_line_feasible = l1 >= -rel_tol * s1;
  r.nonneg_feasible = r.real_line_feasible && l2 >= -rel_tol * s2;
  return r;
}

DiscreteRV build_yes_rv(int ell, int mu) {
  check_odd_order(ell);
  if (mu < 1) throw InvalidInput("mu must be a positive integer");
  PsdReport psd = psd_feasibility(hankel_matrices(gaussian_raw_moments(mu, ell)));
  if (!psd.nonneg_feasible)
    throw NumericalFailure("moment matrices not PSD at ell=" + std::to_string(ell) + ", mu=" + std::to_string(mu));

  // Chebyshev algorithm on the centred moment sequence, then shift by mu.
  const int N = (ell + 1) / 2;
  std::vector<LD> mom(2 * N);
  for (int k = 0; k < 2 * N; ++k) mom[k] = std_normal_moment(k);
  std::vector<LD> alpha(N), beta(N);
  std::vector<LD> sig_prev(2 * N, 0), sig(mom.begin(), mom.end());
  alpha[0] = mom[1] / mom[0];
  beta[0] = mom[0];
  for (int k = 1; k < N; ++k) {
    std::vector<LD> next(2 * N, 0);
    for (int l = k; l < 2 * N - k; ++l)
      next[l] = sig[l + 1] - alpha[k - 1] * sig[l] - beta[k - 1] * sig_prev[l];
    if (!(next[k] > 0)) throw NumericalFailure("recurrence breakdown at step " + std::to_string(k));
    alpha[k] = next[k + 1] / next[k] - sig[k] / sig[k - 1];
    beta[k] = next[k] / sig[k - 1];
    sig_prev = sig;
    sig = next;
  }
  MatL J = MatL::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    J(i, i) = alpha[i];
    if (i + 1 < N) J(i, i + 1) = J(i + 1, i) = std::sqrt(beta[i + 1]);
  }
  Eigen::SelfAdjointEigenSolver<MatL> es(J);
  DiscreteRV rv;
  for (int i = 0; i < N; ++i) {
    LD x = es.eigenvalues()(i) + mu;
    if (x < -1e-10L) throw NumericalFailure("quadrature node below zero; mu too small");
    if (x < 0) x = 0;
    LD w = es.eigenvectors()(0, i);
    rv.atoms.push_back(static_cast<double>(x));
    rv.probs.push_back(static_cast<double>(w * w * mom[0]));
  }
  double total = std::accumulate(rv.probs.begin(), rv.probs.end(), 0.0);
  for (double& p : rv.probs) p /= total;
  return rv;
}

namespace {

std::vector<LD> candidate_grid(int ell, int mu, int round, int base) {
  boost::math::normal_distribution<LD> nd;
  const int G = base << round;
  std::vector<LD> xs;
  for (int i = 1; i <= G; ++i) xs.push_back(mu + boost::math::quantile(nd, static_cast<LD>(i) / (G + 1)));
  for (LD x : {-2.0L, -1.0L, -0.5L}) xs.push_back(x);
  if (round > 0) {
    for (int j = 0; j <= 2 * ell + 4 * round; ++j) {
      LD off = 2.5L + 0.5L * j;
      xs.push_back(mu + off);
      xs.push_back(mu - off);
    }
    for (int j = 1; j <= 4 * round; ++j) xs.push_back(-0.25L * j);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(), [](LD a, LD b) { return std::abs(a - b) < 1e-12L; }), xs.end());
  return xs;
}

// Rows: total mass, centred scaled moments 1..ell, negative mass.
void no_rv_system(const std::vector<LD>& xs, int ell, int mu, MatL& A, VecL& b) {
  const int n = static_cast<int>(xs.size());
  LD scale = 0;
  for (LD x : xs) scale = std::max(scale, std::abs(x - mu));
  A.resize(ell + 2, n);
  b.resize(ell + 2);
  for (int j = 0; j < n; ++j) {
    A(0, j) = 1;
    LD y = (xs[j] - mu) / scale;
    LD p = 1;
    for (int k = 1; k <= ell; ++k) {
      p *= y;
      A(k, j) = p;
    }
    A(ell + 1, j) = xs[j] < 0 ? 1 : 0;
  }
  b(0) = 1;
  for (int k = 1; k <= ell; ++k) b(k) = std_normal_moment(k) / std::pow(scale, static_cast<LD>(k));
  boost::math::normal_distribution<LD> nd;
  b(ell + 1) = boost::math::cdf(nd, static_cast<LD>(-mu));
  for (int r = 0; r < A.rows(); ++r) {
    LD s = A.row(r).cwiseAbs().maxCoeff();
    if (s > 0) {
      A.row(r) /= s;
      b(r) /= s;
    }
  }
}

}  // namespace

DiscreteRV build_no_rv(int ell, int mu, const NoRvOptions& opt) {
  check_odd_order(ell);
  if (mu < 1) throw InvalidInput("mu must be a positive integer");
  for (int round = 0; round <= opt.max_rounds; ++round) {
    std::vector<LD> xs = candidate_grid(ell, mu, round, opt.grid);
    MatL A;
    VecL b;
    no_rv_system(xs, ell, mu, A, b);
    VecL cost = VecL::Zero(A.cols());
    if (opt.objective == NoRvObjective::DeepNegative)
      for (int j = 0; j < A.cols(); ++j)
        if (xs[j] < 0) cost(j) = -xs[j];
    LpResult<LD> lp = simplex_standard<LD>(A, b, cost, 1e-14L);
    if (lp.status != LpStatus::Optimal) continue;

    std::vector<int> support;
    for (int j = 0; j < lp.x.size(); ++j)
      if (lp.x(j) > 0) support.push_back(j);
    // Polish the weights on the basic support.
    MatL As(A.rows(), support.size());
    for (size_t s = 0; s < support.size(); ++s) As.col(s) = A.col(support[s]);
    VecL p = As.colPivHouseholderQr().solve(b);
    bool ok = (p.array() >= -1e-15L).all() && (As * p - b).cwiseAbs().maxCoeff() < 1e-14L;
    DiscreteRV rv;
    for (size_t s = 0; s < support.size(); ++s) {
      LD w = ok ? std::max<LD>(0, p(s)) : lp.x(support[s]);
      if (w <= 0) continue;
      rv.atoms.push_back(static_cast<double>(xs[support[s]]));
      rv.probs.push_back(static_cast<double>(w));
    }
    double total = std::accumulate(rv.probs.begin(), rv.probs.end(), 0.0);
    for (double& q : rv.probs) q /= total;
    if (rv.negative_mass() <= 0) continue;
    return rv;
  }
  throw NumericalFailure("no-RV LP infeasible after " + std::to_string(opt.max_rounds) + " grid enlargements");
}

int find_mu(int ell, int cap) {
  check_odd_order(ell);
  if (cap <= 0) cap = 10 * ell;
  for (int mu = 1; mu <= cap; ++mu) {
    try {
      build_yes_rv(ell, mu);
      return mu;
    } catch (const NumericalFailure&) {
    }
  }
  throw NumericalFailure("find_mu: no mu <= " + std::to_string(cap) + " works for ell=" + std::to_string(ell));
}

YesNoPair build_pair(int ell, int mu) {
  YesNoPair p;
  p.ell = ell;
  p.mu = mu > 0 ? mu : find_mu(ell);
  p.yes_rv = build_yes_rv(ell, p.mu);
  p.no_rv = build_no_rv(ell, p.mu);
  return p;
}

double max_relative_moment_error(const DiscreteRV& rv, const MomentVector& m) {
  double worst = 0;
  for (int k = 1; k <= m.order(); ++k) {
    double target = m.at(k);
    double denom = std::abs(target) > 0 ? std::abs(target) : 1.0;
    worst = std::max(worst, std::abs(rv.moment(k) - target) / denom);
  }
  return worst;
}

BigInt det_bareiss(std::vector<std::vector<BigInt>> a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return 1;
  BigInt sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (a[i][k] != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

BigInt det_b(int ell) {
  if (ell < 1 || ell % 2 == 0) throw InvalidInput("det_b: ell must be odd");
  const int r = (ell + 1) / 2;
  std::vector<std::vector<BigInt>> b(r, std::vector<BigInt>(r));
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j) b[i - 1][j - 1] = double_factorial_exact(2 * (i + j) - 3);
  return det_bareiss(b);
}

TruncationGap truncation_moment_gap(double mu, int k) {
  if (!(mu > 0) || k < 1) throw InvalidInput("truncation_moment_gap: need mu > 0 and k >= 1");
  // E[z^k 1{z<0}] = (-1)^k * int_0^inf t^k phi(t + mu) dt
  auto f = [&](double t) {
    if (t <= 0) return 0.0;
    return std::exp(k * std::log(t) - 0.5 * (t + mu) * (t + mu)) / std::sqrt(2 * M_PI);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0;
  double gap = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &err);
  if (!std::isfinite(gap)) throw NumericalFailure("truncation gap quadrature failed");
  TruncationGap g;
  g.gap = std::abs(gap);
  g.bound = std::exp(-mu * mu / 2) * double_factorial(k - 1);
  return g;
}

SingularSandwich singular_value_sandwich(int ell, long mu) {
  if (ell < 1 || mu < 1) throw InvalidInput("singular_value_sandwich: need ell >= 1, mu >= 1");
  std::vector<BigInt> m = gaussian_raw_moments_exact(mu, 2 * ell + 1);
  const int size = ell + 1;
  std::vector<std::vector<BigInt>> a(size, std::vector<BigInt>(size));
  MatL al(size, size);
  BigInt fro2 = 0;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      a[i][j] = m[i + j + 1];
      al(i, j) = a[i][j].convert_to<LD>();
      fro2 += a[i][j] * a[i][j];
    }
  SingularSandwich s;
  s.det = det_bareiss(a);
  Eigen::SelfAdjointEigenSolver<MatL> es(al, Eigen::EigenvaluesOnly);
  s.sigma_max = static_cast<double>(es.eigenvalues().cwiseAbs().maxCoeff());
  s.frobenius = static_cast<double>(sqrt(fro2.convert_to<LD>()));
  LD fact = 1;
  for (int j = 2; j <= 2 * ell + 1; ++j) fact *= j;
  s.sigma_bound = static_cast<double>(static_cast<LD>(size) * size * fact * std::pow(static_cast<LD>(mu), 2 * ell + 1));
  s.holds = abs(s.det) >= 1 && s.sigma_max <= s.sigma_bound;
  return s;
}

}  // namespace monotest
