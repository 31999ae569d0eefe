#pragma once

#include <optional>
#include <vector>

#include "monotest/core.hpp"
#include "monotest/instances.hpp"

namespace monotest {

/// Orthogonal projector onto span of the rows of a cube point set.
class SpanProjector {
 public:
  explicit SpanProjector(const Mat& rows);
  double dist(const Eigen::Ref<const Vec>& v) const;
  Vec project(const Eigen::Ref<const Vec>& v) const;
  int rank() const { return static_cast<int>(q_.cols()); }

 private:
  Mat q_;  // n x rank orthonormal basis
};

double dist_to_span(const Eigen::Ref<const Vec>& v, const CubePointSet& a);

/// Distinct column directions of A up to sign, with each column's direction
/// index and orientation.
struct ColumnDirections {
  std::vector<Eigen::VectorXi> dirs;  // first entry +1
  std::vector<int> dir_of;            // per column
  std::vector<int> orient;            // +-1 per column
};
ColumnDirections column_directions(const CubePointSet& a);

/// Sign vectors of the open cells of the central arrangement with the given
/// normals (each entry +-1 per normal).
std::vector<std::vector<int>> arrangement_cells(const std::vector<Eigen::VectorXi>& normals);

/// Count formula 2 * sum_{i<k} C(m-1, i) for m normals in general position in R^k.
long general_position_cell_count(int m, int k);

/// Roundings sign(U)/sqrt(n) of U in span(A) with U having no zero coordinate,
/// computed exactly via arrangement cells.
CubePointSet cover_set(const CubePointSet& a);

std::vector<int> cube_points_near_span(const CubePointSet& x, const CubePointSet& a, double r);

struct LowWeightRep {
  Vec u;
  Vec betas;
  double realized_gamma1 = 0.0;
  double realized_gamma2_ratio = 1.0;
  double dist = 0.0;
  int case_used = 1;
};
LowWeightRep low_weight_rep(const Eigen::Ref<const Vec>& v, const CubePointSet& a);

struct CompatibilityVerdict {
  bool compatible = true;
  std::optional<Vec> witness_betas;
  double margin = 0.0;  // max over the box of |sum(V-U)| - (|V-U|_2 + eps) log n
  bool shortcut = false;
};
CompatibilityVerdict compatibility(const Eigen::Ref<const Vec>& v, const CubePointSet& a, double eps,
                                   double gamma1);
/// Objective |sum(V-U)| - (|V-U|_2 + eps) log n at a given beta.
double compatibility_objective(const Eigen::Ref<const Vec>& v, const CubePointSet& a, const Vec& beta, double eps);

/// Pr[(A, V) w in [-2 eps, 2 eps]^{k+1}] for i.i.d. coefficients from rv.
/// Rejects V compatible with A under the given gamma1. A positive
/// `half_width` replaces 2 eps as the box half-width.
Estimate incompatibility_box_probe(const CubePointSet& a, const Eigen::Ref<const Eigen::VectorXi>& v_signs,
                                   const DiscreteRV& rv, double eps, double gamma1, std::int64_t samples, Rng rng,
                                   double half_width = -1.0);

struct ConcentrationReport {
  double probability = 0.0;
  double stderr_ = 0.0;
  double threshold = 0.0;
  double hoeffding_ceiling = 0.0;
  std::int64_t samples = 0;
};
ConcentrationReport concentration_probe(const Vec& w, const DiscreteRV& rv, std::int64_t samples, Rng rng);

struct GramCheck {
  double det = 0.0;
  double product_of_residuals_sq = 0.0;
  std::vector<double> residuals;
};
GramCheck gram_det_check(const Mat& rows);

}  // namespace monotest
