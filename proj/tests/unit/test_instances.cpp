#include <cmath>

#include <gtest/gtest.h>

#include "monotest/instances.hpp"

using namespace monotest;

TEST(ChooseH, SmallestOddAtLeastFiveOverC) {
  EXPECT_EQ(choose_h(1.0), 5);
  EXPECT_EQ(choose_h(2.0), 3);
  EXPECT_EQ(choose_h(0.5), 11);
  EXPECT_EQ(choose_h(5.0), 1);
  EXPECT_EQ(choose_h(5.0 / 7.0), 7);
  EXPECT_THROW(choose_h(0.0), InvalidInput);
}

TEST(QueryMatrix, ScaledEntries) {
  Eigen::MatrixXi s(2, 4);
  s << 1, -1, 1, 1, -1, -1, 1, -1;
  QueryMatrix qm(s);
  EXPECT_EQ(qm.d(), 2);
  EXPECT_EQ(qm.n(), 4);
  EXPECT_DOUBLE_EQ(qm.scale(), 0.5);
  EXPECT_DOUBLE_EQ(qm.entries()(0, 1), -0.5);
  EXPECT_DOUBLE_EQ(qm.row(1).norm(), 1.0);
  QueryMatrix sub = qm.select_rows({1, 1});
  EXPECT_EQ(sub.signs().row(0), s.row(1));
  EXPECT_EQ(sub.signs().row(1), s.row(1));
}

TEST(QueryMatrix, RejectsNonSignEntries) {
  Eigen::MatrixXi s(1, 2);
  s << 1, 0;
  EXPECT_THROW(QueryMatrix{s}, InvalidInput);
}

TEST(Eval, SignOfZeroIsPlus) {
  LTF f{Vec::Constant(2, 1.0)};
  Eigen::VectorXi x(2);
  x << 1, -1;
  EXPECT_EQ(eval(f, x), 1);
  x << -1, -1;
  EXPECT_EQ(eval(f, x), -1);
}

TEST(Eval, IndexMatchesVector) {
  Rng rng(5);
  LTF f{Vec::Random(6)};
  for (std::uint64_t idx = 0; idx < 64; ++idx) {
    Eigen::VectorXi x(6);
    for (int j = 0; j < 6; ++j) x(j) = ((idx >> j) & 1) ? 1 : -1;
    EXPECT_EQ(eval_index(f, idx), eval(f, x));
  }
}

TEST(Family, DefaultOrderIsHCubed) {
  HardInstanceFamily fam = make_family(16, 5.0);  // h = 1
  EXPECT_EQ(fam.h, 1);
  EXPECT_EQ(fam.ell, 1);
  EXPECT_THROW(make_family(16, 1.0), ResourceGuard);  // 125 > cap
  HardInstanceFamily f3 = make_family(16, 1.0, 3);
  EXPECT_TRUE(f3.ell_overridden);
  EXPECT_EQ(f3.pair.mu, 1);
}

TEST(Sampling, DeterministicPerSeed) {
  HardInstanceFamily fam = make_family(12, 1.0, 3);
  Rng a(7), b(7);
  EXPECT_EQ(sample_no(fam, a).weights, sample_no(fam, b).weights);
}

TEST(Sampling, YesWeightsNonnegative) {
  HardInstanceFamily fam = make_family(50, 1.0, 5);
  Rng rng(1);
  for (int t = 0; t < 20; ++t) EXPECT_GE(sample_yes(fam, rng).weights.minCoeff(), 0.0);
}

TEST(CoefficientSampler, MeanAndVarianceMatchMoments) {
  // Each coordinate is sum_j w_j X_ij / sqrt(n): mean mu * rowsum / sqrt(n),
  // variance Var(w) * 1 (rows have unit norm).
  Rng rng(11);
  QueryMatrix qm = QueryMatrix::random(3, 40, rng);
  YesNoPair pair = build_pair(3);
  for (const DiscreteRV* rv : {&pair.yes_rv, &pair.no_rv}) {
    CoefficientSampler s(qm, {{0, qm.n(), rv}});
    const int N = 200000;
    Vec sum = Vec::Zero(3), sum2 = Vec::Zero(3);
    for (int t = 0; t < N; ++t) {
      Vec v = s.draw(rng);
      sum += v;
      sum2 += v.cwiseProduct(v);
    }
    Vec mean = sum / N;
    Vec expect = qm.entries().rowwise().sum() * pair.mu;
    const double var = rv->moment(2) - rv->moment(1) * rv->moment(1);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(mean(i), expect(i), 5 * std::sqrt(var / N));
      EXPECT_NEAR(sum2(i) / N - mean(i) * mean(i), var, 0.02);
    }
  }
}

TEST(CoefficientSampler, UnscaledTimesScaleEqualsDraw) {
  Rng rng(2);
  QueryMatrix qm = QueryMatrix::random(2, 9, rng);
  YesNoPair pair = build_pair(3);
  CoefficientSampler s(qm, {{0, 9, &pair.no_rv}});
  Rng a(4), b(4);
  Vec u(2);
  s.draw_unscaled(a, u);
  EXPECT_TRUE((u * s.scale()).isApprox(s.draw(b)));
}

TEST(Hybrid, EndpointsUseOneSide) {
  Rng rng(3);
  QueryMatrix qm = QueryMatrix::random(2, 6, rng);
  YesNoPair pair = build_pair(3);
  Rng a(9), b(9);
  CoefficientSampler yes(qm, {{0, 6, &pair.yes_rv}});
  EXPECT_TRUE(sample_hybrid(qm, pair, 0, a).isApprox(yes.draw(b)));
  EXPECT_THROW(sample_hybrid(qm, pair, 7, a), InvalidInput);
}
