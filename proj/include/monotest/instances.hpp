#pragma once

#include <optional>
#include <vector>

#include "monotest/core.hpp"
#include "monotest/momentlab.hpp"

namespace monotest {

/// Zero-threshold (by default) linear threshold function over {-1,1}^n.
struct LTF {
  Vec weights;
  double threshold = 0.0;
  int n() const { return static_cast<int>(weights.size()); }
};

/// d x n matrix of +-1/sqrt(n) entries. `signs` holds the unscaled +-1 values;
/// every scaled entry is exactly +-scale().
class QueryMatrix {
 public:
  QueryMatrix() = default;
  explicit QueryMatrix(Eigen::MatrixXi signs);

  int d() const { return static_cast<int>(signs_.rows()); }
  int n() const { return static_cast<int>(signs_.cols()); }
  double scale() const { return 1.0 / std::sqrt(static_cast<double>(n())); }
  const Eigen::MatrixXi& signs() const { return signs_; }
  /// Scaled d x n matrix.
  Mat entries() const;
  Vec row(int i) const;

  QueryMatrix select_rows(const std::vector<int>& idx) const;
  static QueryMatrix random(int d, int n, Rng& rng);

 private:
  Eigen::MatrixXi signs_;
};

/// Point sets on the scaled cube share the query matrix representation.
using CubePointSet = QueryMatrix;

struct HardInstanceFamily {
  int n = 0;
  double c = 1.0;
  int h = 5;
  int ell = 125;
  bool ell_overridden = false;
  YesNoPair pair;
};

int choose_h(double c);
/// Builds the family. When `ell` is absent it defaults to h^3 (subject to the
/// moment order cap).
HardInstanceFamily make_family(int n, double c, std::optional<int> ell = std::nullopt,
                               std::optional<int> mu = std::nullopt);

double draw(const DiscreteRV& rv, Rng& rng);

LTF sample_yes(const HardInstanceFamily& fam, Rng& rng);
LTF sample_no(const HardInstanceFamily& fam, Rng& rng);
LTF sample_ltf(const DiscreteRV& rv, int n, Rng& rng);

int eval(const LTF& f, const Eigen::Ref<const Eigen::VectorXi>& x);
/// Evaluation at the cube point encoded by `index` (bit j set iff x_j = +1).
int eval_index(const LTF& f, std::uint64_t index);

/// A block of consecutive columns [begin, end) whose coefficients are drawn
/// i.i.d. from `rv`.
struct ColumnBlock {
  int begin = 0;
  int end = 0;
  const DiscreteRV* rv = nullptr;
};

/// Draws sum_j w_j X^(j) for independent per-column coefficients. Columns are
/// grouped by their sign type so a draw costs O(types * atoms) instead of O(d n).
/// Draws are returned unscaled (multiply by qm.scale() for the true vector);
/// sign patterns can be read off the unscaled vector directly.
class CoefficientSampler {
 public:
  CoefficientSampler(const QueryMatrix& qm, const std::vector<ColumnBlock>& blocks);

  void draw_unscaled(Rng& rng, Eigen::Ref<Vec> out) const;
  Vec draw(Rng& rng) const;
  int d() const { return d_; }
  double scale() const { return scale_; }

 private:
  struct Group {
    Vec type;  // unscaled +-1 column
    int count = 0;
    const DiscreteRV* rv = nullptr;
  };
  int d_ = 0;
  double scale_ = 1.0;
  std::vector<Group> groups_;
};

Vec sample_coeff_vector(const QueryMatrix& qm, const DiscreteRV& rv, Rng& rng);
/// Q^(i): coefficients 1..i from the no RV, i+1..n from the yes RV.
Vec sample_hybrid(const QueryMatrix& qm, const YesNoPair& pair, int i, Rng& rng);

}  // namespace monotest
