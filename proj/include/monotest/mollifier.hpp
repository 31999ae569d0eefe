#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "monotest/core.hpp"

namespace monotest {

/// b(x) = c * exp(-1/(1-x^2)) on (-1,1), zero elsewhere, with c making the
/// integral one.
class Bump {
 public:
  static const Bump& instance();
  double normalization() const { return c_; }
  double operator()(double x) const;
  /// Cumulative integral of b from -1 to x, evaluated from the table.
  double cdf(double x) const;
  /// Cumulative integral by direct quadrature from the nearest knot.
  double cdf_exact(double x) const;

 private:
  Bump();
  double c_;
  int knots_;
  double h_;
  std::vector<double> value_;  // B at knots
  std::vector<double> slope_;  // limited derivatives at knots
};

/// Phi_eps(x) = B(2x/eps - 1): zero for x <= 0, one for x >= eps.
class Mollifier1D {
 public:
  explicit Mollifier1D(double eps);
  double eps() const { return eps_; }
  double operator()(double x) const;
  double value_exact(double x) const;
  double derivative(double x) const;

 private:
  double eps_;
};

inline double phi_eps(double x, double eps) { return Mollifier1D(eps)(x); }

/// Smooth approximation of a union of orthants.
class OrthantMollifier {
 public:
  /// `orthants` are sign vectors of length d; duplicates are rejected.
  OrthantMollifier(std::vector<std::vector<int>> orthants, double eps);
  OrthantMollifier(int d, const std::vector<std::uint64_t>& keys, double eps);

  int d() const { return d_; }
  double eps() const { return phi_.eps(); }
  bool contains_key(std::uint64_t key) const;
  /// Product form, using that only the orthant containing x can contribute.
  double operator()(const Eigen::Ref<const Vec>& x) const;
  /// Literal sum over listed orthants of prod_i Phi_eps(o_i x_i).
  double sum_form(const Eigen::Ref<const Vec>& x) const;
  const std::vector<std::uint64_t>& keys() const { return keys_; }

 private:
  int d_;
  Mollifier1D phi_;
  std::vector<std::uint64_t> keys_;  // sorted
};

double alpha(int k);

struct DerivativeReport {
  int k = 0;
  double eps = 0.0;
  double max_abs = 0.0;
  double bound = 0.0;
  bool holds = false;
};
DerivativeReport derivative_bound_check(double eps, int k, int grid_size);

/// Richardson-extrapolated central difference of order k.
double fd_derivative(const std::function<double(double)>& f, double x, int k, double h);

struct SupportReport {
  std::int64_t checked = 0;   // points where the derivative must vanish
  std::int64_t violations = 0;
  std::int64_t interior = 0;  // points inside O with all J-coordinates in (0, eps)
  std::int64_t interior_nonzero = 0;
  double max_forbidden = 0.0;
  double noise_floor = 0.0;
  bool passed = false;
};
SupportReport psi_support_check(const OrthantMollifier& m, const std::vector<int>& j_support,
                                std::int64_t samples, Rng& rng);

class BoxMollifierPair {
 public:
  BoxMollifierPair(double eps, double xi, int dim);
  double psi_in(const Eigen::Ref<const Vec>& x) const;
  double psi_out(const Eigen::Ref<const Vec>& x) const;
  bool in_box(const Eigen::Ref<const Vec>& x) const;
  double eps() const { return eps_; }
  double xi() const { return xi_; }
  int dim() const { return dim_; }

 private:
  double eps_, xi_;
  int dim_;
  Mollifier1D phi_;
};

}  // namespace monotest
