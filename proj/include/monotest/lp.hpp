#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "monotest/core.hpp"

namespace monotest {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  VecT<Scalar> x;
  Scalar objective = 0;
  std::vector<int> basis;  // basic column per surviving row
};

/// Dense two-phase simplex with Bland's rule.
///   maximize c'x  subject to  A x = b,  x >= 0.
/// Intended for the small, dense problems in this library (a few hundred
/// columns, a few dozen rows).
template <typename Scalar>
LpResult<Scalar> simplex_standard(const MatT<Scalar>& A, const VecT<Scalar>& b,
                                  const VecT<Scalar>& c, Scalar tol = Scalar(1e-11)) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n) throw InvalidInput("simplex: dimension mismatch");

  // Tableau: m rows of [A | I_art | b], plus objective rows kept separately.
  const int width = n + m + 1;
  MatT<Scalar> T = MatT<Scalar>::Zero(m, width);
  for (int i = 0; i < m; ++i) {
    Scalar s = b(i) < 0 ? Scalar(-1) : Scalar(1);
    T.row(i).head(n) = s * A.row(i);
    T(i, n + i) = 1;
    T(i, width - 1) = s * b(i);
  }
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;
  std::vector<bool> active(m, true);

  auto pivot = [&](int r, int col) {
    T.row(r) /= T(r, col);
    for (int i = 0; i < m; ++i) {
      if (i != r && active[i] && T(i, col) != Scalar(0)) T.row(i) -= T(i, col) * T.row(r);
    }
    basis[r] = col;
  };

  // Runs the simplex on objective `cost` (maximize) restricted to columns < ncols.
  auto run = [&](const VecT<Scalar>& cost, int ncols) -> LpStatus {
    for (int iter = 0; iter < 50000; ++iter) {
      // reduced costs: cost_j - c_B' T_j
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        Scalar rc = cost(j);
        for (int i = 0; i < m; ++i)
          if (active[i]) rc -= cost(basis[i]) * T(i, j);
        if (rc > tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (int i = 0; i < m; ++i) {
        if (!active[i] || T(i, enter) <= tol) continue;
        Scalar ratio = T(i, width - 1) / T(i, enter);
        if (ratio < best - tol || (ratio <= best + tol && leave >= 0 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    throw NumericalFailure("simplex: iteration limit reached");
  };

  // Phase I: maximize -sum(artificials).
  VecT<Scalar> phase1 = VecT<Scalar>::Zero(n + m);
  phase1.tail(m).setConstant(Scalar(-1));
  run(phase1, n + m);
  Scalar infeas = 0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n) infeas += T(i, width - 1);
  Scalar bscale = std::max<Scalar>(Scalar(1), b.cwiseAbs().maxCoeff());
  LpResult<Scalar> out;
  if (infeas > tol * bscale * Scalar(10)) return out;

  // Drive artificials out of the basis; drop redundant rows.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j)
      if (std::abs(T(i, j)) > tol * Scalar(100)) {
        col = j;
        break;
      }
    if (col >= 0)
      pivot(i, col);
    else
      active[i] = false;
  }

  VecT<Scalar> cost = VecT<Scalar>::Zero(n + m);
  cost.head(n) = c;
  LpStatus st = run(cost, n);
  out.status = st;
  out.x = VecT<Scalar>::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (!active[i]) continue;
    out.x(basis[i]) = std::max<Scalar>(Scalar(0), T(i, width - 1));
    out.basis.push_back(basis[i]);
  }
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace monotest
