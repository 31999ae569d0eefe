#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "monotest/pruning.hpp"

using namespace monotest;

namespace {

// Rows near span of two base rows: sign of a random combination, then a few flips.
QueryMatrix near_span_set(int d, int n, Rng& rng) {
  QueryMatrix base = QueryMatrix::random(2, n, rng);
  Eigen::MatrixXi s(d, n);
  for (int i = 0; i < d; ++i) {
    double a = rng.normal(), b = rng.normal();
    for (int j = 0; j < n; ++j) s(i, j) = sign_of(a * base.signs()(0, j) + b * base.signs()(1, j));
    int flips = static_cast<int>(rng.below(3));
    for (int f = 0; f < flips; ++f) s(i, rng.below(n)) *= -1;
  }
  return QueryMatrix(s);
}

double svd_dist(const Vec& v, const Mat& rows) {
  Eigen::JacobiSVD<Mat> svd(rows.transpose(), Eigen::ComputeThinU);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-10) ++rank;
  Mat u = svd.matrixU().leftCols(rank);
  return (v - u * (u.transpose() * v)).norm();
}

DiscreteRV two_point() {
  DiscreteRV r{{0.5, 1.5}, {0.5, 0.5}};
  return r;
}

YesNoPair toy_pair() { return YesNoPair{1, 1, two_point(), DiscreteRV{{-1.0, 1.0, 3.0}, {0.25, 0.5, 0.25}}}; }

}  // namespace

TEST(ScatterParams, EpsilonFormula) {
  ScatterParams p = ScatterParams::asymptotic(4096, 16);
  EXPECT_NEAR(p.eps, std::pow(4096.0, 0.25 - 0.5), 1e-15);
  EXPECT_EQ(p.scatter_log_power, 5.0);
  EXPECT_EQ(ScatterParams::desk(4096, 16).scatter_log_power, 0.0);
  EXPECT_EQ(ScatterParams::desk(4096, 16).eps, p.eps);
}

TEST(Deduplicate, KeepsFirstOccurrences) {
  Rng rng(1);
  QueryMatrix x = QueryMatrix::random(3, 8, rng);
  QueryMatrix dup = x.select_rows({0, 1, 0, 2, 1});
  std::vector<int> kept;
  QueryMatrix d = deduplicate(dup, &kept);
  EXPECT_EQ(kept, (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(d.signs(), x.signs());
}

TEST(Partition, CoversExactlyTheNearRows) {
  Rng rng(2);
  int done = 0;
  for (int t = 0; t < 8; ++t) {
    QueryMatrix x = near_span_set(20, 32, rng);
    QueryMatrix a = x.select_rows({0, 1});
    ScatterParams params = ScatterParams::desk(32, 3);
    double r = 0.6;
    PartitionResult p;
    try {
      p = partition_r(x, a, r, params);
    } catch (const NumericalFailure&) {
      continue;
    }
    std::set<int> got;
    for (auto* l : {&p.cover, &p.remove, &p.incomp})
      for (int i : *l) EXPECT_TRUE(got.insert(i).second) << "row in two parts";
    std::vector<int> kept;
    deduplicate(x, &kept);
    std::set<int> want;
    for (int i : kept) {
      bool in_a = x.signs().row(i) == a.signs().row(0) || x.signs().row(i) == a.signs().row(1);
      if (!in_a && svd_dist(x.row(i), a.entries()) <= r + 1e-12) want.insert(i);
    }
    EXPECT_EQ(got, want);
    for (auto [c, rm] : p.close_pairs) EXPECT_LE((x.row(c) - x.row(rm)).norm(), 4 * r + 1e-12);
    ++done;
  }
  EXPECT_GT(done, 0);
}

TEST(Partition, RejectsBadArguments) {
  Rng rng(3);
  QueryMatrix x = QueryMatrix::random(5, 16, rng);
  ScatterParams params = ScatterParams::desk(16, 2);
  EXPECT_THROW(partition_r(x, x.select_rows({0, 1, 2}), 0.5, params), InvalidInput);
  EXPECT_THROW(partition_r(x, x.select_rows({0}), -1.0, params), InvalidInput);
}

TEST(Scattered, SingleRowIsScattered) {
  Rng rng(4);
  QueryMatrix x = QueryMatrix::random(1, 16, rng);
  ScatterReport r = is_scattered(x, 3, ScatterParams::desk(16, 3));
  EXPECT_TRUE(r.scattered);
  EXPECT_EQ(r.mode, "exhaustive");
}

TEST(Prune, OutputIsScatteredSubset) {
  Rng rng(5);
  int done = 0, steps = 0;
  for (int t = 0; t < 4; ++t) {
    QueryMatrix x = near_span_set(16, 32, rng);
    ScatterParams params = ScatterParams::desk(32, 3);
    PruneOutput out;
    try {
      out = prune(x, 3, params);
    } catch (const NumericalFailure&) {
      continue;
    }
    const PruneTrace& tr = out.trace;
    int removed = 0;
    for (const auto& st : tr.steps) removed += static_cast<int>(st.removed.size());
    EXPECT_EQ(tr.final_size, tr.initial_size - tr.duplicates_removed - removed);
    EXPECT_EQ(out.pruned.d(), tr.final_size);
    EXPECT_TRUE(std::is_sorted(tr.kept.begin(), tr.kept.end()));
    for (std::size_t i = 0; i < tr.kept.size(); ++i)
      EXPECT_EQ(out.pruned.signs().row(i), x.signs().row(tr.kept[i]));
    EXPECT_TRUE(is_scattered(out.pruned, 3, params).scattered);
    // Every removed row sits within r of the span of its step's subset.
    for (const auto& st : tr.steps) {
      QueryMatrix a = x.select_rows(st.a);
      for (int i : st.removed) EXPECT_LE(svd_dist(x.row(i), a.entries()), st.r + 1e-9);
    }
    double tele = 0;
    for (const auto& st : tr.steps) tele += static_cast<double>(st.removed.size()) / st.size_before;
    EXPECT_DOUBLE_EQ(tr.telescoping_sum(), tele);
    ++done;
    steps += static_cast<int>(tr.steps.size());
  }
  EXPECT_GT(done, 0);
  EXPECT_GT(steps, 0);
}

TEST(Prune, Deterministic) {
  Rng rng(6);
  QueryMatrix x = near_span_set(14, 32, rng);
  ScatterParams params = ScatterParams::desk(32, 2);
  try {
    PruneOutput a = prune(x, 2, params), b = prune(x, 2, params);
    EXPECT_EQ(a.trace.kept, b.trace.kept);
  } catch (const NumericalFailure&) {
    GTEST_SKIP() << "sum check aborted";
  }
}

TEST(Drift, IdenticalSetsGiveZero) {
  Rng rng(7);
  QueryMatrix x = QueryMatrix::random(4, 8, rng);
  DriftResult r = duo_drift_check(x, x, toy_pair(), 20000, Rng(1));
  EXPECT_EQ(r.drift, 0.0);
  EXPECT_EQ(r.before.value, r.after.value);
}

TEST(Drift, DuplicatesDoNotMoveTheDistance) {
  Rng rng(8);
  QueryMatrix x = QueryMatrix::random(4, 8, rng);
  QueryMatrix dup = x.select_rows({0, 1, 2, 3, 0, 2, 2});
  DriftResult r = duo_drift_check(dup, x, toy_pair(), 20000, Rng(2));
  EXPECT_EQ(r.drift, 0.0);
}

TEST(Drift, RejectsNonSubset) {
  Rng rng(9);
  QueryMatrix x = QueryMatrix::random(3, 8, rng);
  Eigen::MatrixXi other = -x.signs().topRows(1);
  if ((other.row(0).array() == x.signs().row(1).array()).all() ||
      (other.row(0).array() == x.signs().row(2).array()).all())
    GTEST_SKIP();
  EXPECT_THROW(duo_drift_check(x, QueryMatrix(other), toy_pair(), 100, Rng(1)), InvalidInput);
}

TEST(BadOrthant, NoPairsNoMass) {
  Rng rng(10);
  QueryMatrix x = QueryMatrix::random(3, 8, rng);
  EXPECT_EQ(bad_orthant_mass(x, {}, two_point(), 1000, Rng(1)).value, 0.0);
  Estimate same = bad_orthant_mass(x.select_rows({0, 0}), {{0, 1}}, two_point(), 1000, Rng(1));
  EXPECT_EQ(same.value, 0.0);
}
