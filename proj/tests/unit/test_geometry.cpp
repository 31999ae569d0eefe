#include <cmath>
#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "monotest/geometry.hpp"

using namespace monotest;

namespace {

QueryMatrix from_rows(std::vector<std::vector<int>> rows) {
  Eigen::MatrixXi s(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[0].size(); ++j) s(i, j) = rows[i][j];
  return QueryMatrix(s);
}

std::vector<int> row_vec(const QueryMatrix& q, int i) {
  std::vector<int> r(q.n());
  for (int j = 0; j < q.n(); ++j) r[j] = q.signs()(i, j);
  return r;
}

}  // namespace

TEST(SpanProjector, MatchesNormalEquations) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    QueryMatrix a = QueryMatrix::random(3, 10, rng);
    Mat A = a.entries();
    Eigen::FullPivLU<Mat> lu(A);
    if (lu.rank() < 3) continue;
    Vec v = Vec::NullaryExpr(10, [&](Eigen::Index) { return rng.normal(); });
    Vec beta = (A * A.transpose()).ldlt().solve(A * v);
    Vec p = A.transpose() * beta;
    SpanProjector proj(A);
    EXPECT_LT((proj.project(v) - p).norm(), 1e-12);
    EXPECT_NEAR(dist_to_span(v, a), (v - p).norm(), 1e-12);
  }
}

TEST(SpanProjector, RankDeficient) {
  QueryMatrix a = from_rows({{1, 1, -1, 1}, {1, 1, -1, 1}, {-1, -1, 1, -1}});
  SpanProjector p(a.entries());
  EXPECT_EQ(p.rank(), 1);
  EXPECT_NEAR(dist_to_span(a.row(0), a), 0.0, 1e-14);
}

TEST(ColumnDirections, UpToSign) {
  QueryMatrix a = from_rows({{1, -1, 1, 1}, {1, -1, -1, 1}});
  ColumnDirections cd = column_directions(a);
  EXPECT_EQ(cd.dirs.size(), 2u);
  EXPECT_EQ(cd.dir_of[0], cd.dir_of[1]);
  EXPECT_EQ(cd.orient[0], -cd.orient[1]);
  EXPECT_EQ(cd.dir_of[0], cd.dir_of[3]);
}

TEST(Arrangement, GeneralPositionFormula) {
  EXPECT_EQ(general_position_cell_count(3, 2), 6);
  EXPECT_EQ(general_position_cell_count(3, 3), 8);
  EXPECT_EQ(general_position_cell_count(4, 3), 14);
  std::vector<Eigen::VectorXi> normals;
  for (auto r : {std::vector<int>{1, 1, 1}, {1, -1, 1}, {1, 1, -1}, {1, -1, -1}})
    normals.push_back(Eigen::Map<Eigen::VectorXi>(r.data(), 3));
  EXPECT_EQ(static_cast<long>(arrangement_cells(normals).size()), general_position_cell_count(4, 3));
}

TEST(CoverSet, MatchesDenseAngleSweep) {
  Rng rng(4);
  QueryMatrix a = QueryMatrix::random(2, 7, rng);
  QueryMatrix cov = cover_set(a);
  std::set<std::vector<int>> got;
  for (int i = 0; i < cov.d(); ++i) got.insert(row_vec(cov, i));
  std::set<std::vector<int>> swept;
  Mat A = a.signs().cast<double>();
  for (int t = 0; t < 200000; ++t) {
    double th = 2 * M_PI * (t + 0.5) / 200000;
    Vec u = A.transpose() * Vec((Vec(2) << std::cos(th), std::sin(th)).finished());
    if ((u.array().abs() < 1e-9).any()) continue;
    std::vector<int> s(7);
    for (int j = 0; j < 7; ++j) s[j] = u(j) > 0 ? 1 : -1;
    swept.insert(s);
  }
  EXPECT_EQ(got, swept);
}

TEST(NearSpan, IncludesMembers) {
  Rng rng(5);
  QueryMatrix x = QueryMatrix::random(10, 12, rng);
  QueryMatrix a = x.select_rows({2, 7});
  auto near = cube_points_near_span(x, a, 1e-9);
  EXPECT_NE(std::find(near.begin(), near.end(), 2), near.end());
  EXPECT_NE(std::find(near.begin(), near.end(), 7), near.end());
}

TEST(LowWeightRep, ProjectionInvariants) {
  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    QueryMatrix a = QueryMatrix::random(2, 16, rng);
    if (Eigen::FullPivLU<Mat>(a.entries()).rank() < 2) continue;
    Vec v = QueryMatrix::random(1, 16, rng).row(0);
    LowWeightRep rep = low_weight_rep(v, a);
    EXPECT_NEAR(rep.dist, dist_to_span(v, a), 1e-12);
    EXPECT_LT((a.entries().transpose() * rep.betas - rep.u).norm(), 1e-10);
    EXPECT_NEAR(rep.realized_gamma1, rep.betas.cwiseAbs().maxCoeff(), 0);
    EXPECT_GE(rep.realized_gamma2_ratio, 1.0 - 1e-9);
  }
}

TEST(LowWeightRep, MemberOfSpan) {
  QueryMatrix a = from_rows({{1, 1, 1, 1, -1, -1, 1, 1}, {1, -1, 1, -1, 1, -1, 1, -1}});
  Vec v = a.row(1);
  LowWeightRep rep = low_weight_rep(v, a);
  EXPECT_NEAR(rep.dist, 0.0, 1e-12);
  EXPECT_NEAR((rep.u - v).norm(), 0.0, 1e-10);
  EXPECT_EQ(rep.case_used, 1);
}

TEST(Compatibility, ObjectiveAtZeroBeta) {
  QueryMatrix a = from_rows({std::vector<int>(16, 1)});
  Vec v = a.row(0);
  // beta = 0: U = 0, |sum V| = 4, |V| = 1, log 16.
  double obj = compatibility_objective(v, a, Vec::Zero(1), 0.1);
  EXPECT_NEAR(obj, 4.0 - (1.0 + 0.1) * std::log(16.0), 1e-12);
}

TEST(Compatibility, SelfIsCompatible) {
  Rng rng(8);
  QueryMatrix a = QueryMatrix::random(2, 16, rng);
  CompatibilityVerdict c = compatibility(a.row(0), a, 0.1, 1.0);
  EXPECT_TRUE(c.compatible);
  EXPECT_THROW(compatibility(a.row(0), a, 0.1, 0.0), InvalidInput);
}

TEST(Gram, DeterminantIsProductOfResiduals) {
  Rng rng(9);
  Mat rows = Mat::NullaryExpr(4, 7, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
  GramCheck g = gram_det_check(rows);
  EXPECT_NEAR(g.det / g.product_of_residuals_sq, 1.0, 1e-10);
  Mat dep(2, 3);
  dep << 1, 2, 3, 2, 4, 6;
  EXPECT_THROW(gram_det_check(dep), InvalidInput);
}

TEST(Concentration, ZeroWeightIsTrivial) {
  DiscreteRV u{{-1.0, 1.0}, {0.5, 0.5}};
  ConcentrationReport r = concentration_probe(Vec::Zero(5), u, 100, Rng(1));
  EXPECT_EQ(r.probability, 0.0);
}

TEST(Concentration, BelowHoeffdingScale) {
  DiscreteRV u{{-1.0, 1.0}, {0.5, 0.5}};
  Vec w = Vec::Ones(400);
  ConcentrationReport r = concentration_probe(w, u, 20000, Rng(2));
  // Tail of a sum of 400 signs beyond 20 * log(400)^0.75, about 2.7 sd.
  double z = r.threshold / 20.0;
  EXPECT_NEAR(r.probability, std::erfc(z / std::sqrt(2.0)), 5 * r.stderr_ + 0.01);
}
