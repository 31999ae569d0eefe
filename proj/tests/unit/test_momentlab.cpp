#include <cmath>

#include <gtest/gtest.h>

#include "monotest/momentlab.hpp"

using namespace monotest;

namespace {

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); }
double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(GaussianMoments, ClosedForms) {
  for (double mu : {0.0, 1.0, 2.5}) {
    MomentVector m = gaussian_raw_moments(mu, 4);
    EXPECT_NEAR(m.at(0), 1.0, 0);
    EXPECT_NEAR(m.at(1), mu, 1e-14);
    EXPECT_NEAR(m.at(2), mu * mu + 1, 1e-13);
    EXPECT_NEAR(m.at(3), mu * mu * mu + 3 * mu, 1e-12);
    EXPECT_NEAR(m.at(4), std::pow(mu, 4) + 6 * mu * mu + 3, 1e-11);
  }
}

TEST(GaussianMoments, ExactMatchesFloating) {
  auto ex = gaussian_raw_moments_exact(3, 9);
  MomentVector m = gaussian_raw_moments(3, 9);
  for (int k = 1; k <= 9; ++k) EXPECT_DOUBLE_EQ(ex[k].convert_to<double>(), m.at(k));
}

TEST(Hankel, PsdForGaussianMoments) {
  for (int ell : {1, 3, 5, 7}) {
    PsdReport r = psd_feasibility(hankel_matrices(gaussian_raw_moments(1.0, ell)));
    EXPECT_TRUE(r.real_line_feasible) << ell;
  }
}

TEST(Hankel, DetectsInfeasibleSequence) {
  MomentVector m;
  m.entries = {2.0, 1.0, 0.0};  // variance 1 - 4 < 0
  EXPECT_FALSE(psd_feasibility(hankel_matrices(m)).real_line_feasible);
}

TEST(YesRv, TwoPointRuleAtMuFive) {
  DiscreteRV u = build_yes_rv(3, 5);
  ASSERT_EQ(u.support_size(), 2);
  EXPECT_NEAR(u.atoms[0], 4.0, 1e-12);
  EXPECT_NEAR(u.atoms[1], 6.0, 1e-12);
  EXPECT_NEAR(u.probs[0], 0.5, 1e-12);
  EXPECT_NEAR(u.moment(1), 5, 1e-12);
  EXPECT_NEAR(u.moment(2), 26, 1e-11);
  EXPECT_NEAR(u.moment(3), 140, 1e-10);
}

TEST(YesRv, OrderOneIsPointMass) {
  DiscreteRV u = build_yes_rv(1, 4);
  ASSERT_EQ(u.support_size(), 1);
  EXPECT_DOUBLE_EQ(u.atoms[0], 4.0);
  EXPECT_DOUBLE_EQ(u.probs[0], 1.0);
}

TEST(YesRv, FailsWhenMuTooSmall) { EXPECT_THROW(build_yes_rv(7, 1), NumericalFailure); }

TEST(FindMu, SmallestFeasibleValues) {
  EXPECT_EQ(find_mu(1), 1);
  EXPECT_EQ(find_mu(3), 1);
  EXPECT_EQ(find_mu(5), 2);
  EXPECT_EQ(find_mu(7), 3);
  EXPECT_EQ(find_mu(9), 3);
}

TEST(NoRv, NegativeMassMatchesNormalTail) {
  DiscreteRV v = build_no_rv(3, 1);
  EXPECT_NEAR(v.negative_mass(), Phi(-1.0), 1e-6);
  EXPECT_NEAR(v.negative_mass(), 0.1587, 1e-4);
  EXPECT_LE(v.support_size(), 3 + 2);
}

TEST(NoRv, FeasibleObjectiveAlsoMatches) {
  NoRvOptions opt;
  opt.objective = NoRvObjective::Feasible;
  DiscreteRV v = build_no_rv(5, 2, opt);
  EXPECT_LE(max_relative_moment_error(v, gaussian_raw_moments(2, 5)), 1e-9);
  EXPECT_GT(v.negative_mass(), 0);
}

TEST(NoRv, MuFiveOrderThree) {
  DiscreteRV v = build_no_rv(3, 5);
  EXPECT_LE(max_relative_moment_error(v, gaussian_raw_moments(5, 3)), 1e-9);
}

class MomentMatch : public ::testing::TestWithParam<int> {};

TEST_P(MomentMatch, BothSidesMatchAndDichotomyHolds) {
  const int ell = GetParam();
  const int mu = find_mu(ell);
  MomentVector m = gaussian_raw_moments(mu, ell);
  DiscreteRV u = build_yes_rv(ell, mu), v = build_no_rv(ell, mu);
  u.validate();
  v.validate();
  EXPECT_LE(max_relative_moment_error(u, m), 1e-9);
  EXPECT_LE(max_relative_moment_error(v, m), 1e-9);
  for (double a : u.atoms) EXPECT_GE(a, 0.0);
  EXPECT_GT(v.negative_mass(), 0.0);
  EXPECT_EQ(u.support_size(), (ell + 1) / 2);
  EXPECT_LE(v.support_size(), ell + 2);
}

INSTANTIATE_TEST_SUITE_P(Orders, MomentMatch, ::testing::Values(1, 3, 5, 7, 9));

TEST(MomentOrder, Guards) {
  EXPECT_THROW(build_yes_rv(4, 2), InvalidInput);
  EXPECT_THROW(build_no_rv(17, 5), ResourceGuard);
  EXPECT_THROW(build_pair(0), InvalidInput);
}

TEST(DetB, ProductOfOddFactorials) {
  EXPECT_EQ(det_b(1), 1);
  EXPECT_EQ(det_b(3), 6);
  EXPECT_EQ(det_b(5), 720);
  EXPECT_EQ(det_b(7), 3628800);
  BigInt nine = BigInt(3628800) * BigInt(362880);
  EXPECT_EQ(det_b(9), nine);
}

TEST(DetBareiss, AgreesWithFloatingDeterminant) {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + static_cast<int>(rng.below(5));
    Mat a(n, n);
    std::vector<std::vector<BigInt>> b(n, std::vector<BigInt>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int v = static_cast<int>(rng.below(11)) - 5;
        a(i, j) = v;
        b[i][j] = v;
      }
    EXPECT_NEAR(det_bareiss(b).convert_to<double>(), a.determinant(), 1e-8);
  }
}

TEST(TruncationGap, FirstMomentClosedForm) {
  // E[max(z,0)] - E[z] = E[max(-z,0)] = phi(mu) - mu Phi(-mu).
  for (double mu : {1.0, 3.0, 5.0}) {
    TruncationGap g = truncation_moment_gap(mu, 1);
    EXPECT_NEAR(g.gap, phi(mu) - mu * Phi(-mu), 1e-12 + 1e-8 * g.gap);
    EXPECT_DOUBLE_EQ(g.bound, std::exp(-mu * mu / 2));
  }
}

TEST(TruncationGap, TinyForLargeMu) {
  EXPECT_LT(truncation_moment_gap(10, 3).gap, 1e-20);
  for (int k = 1; k <= 6; ++k) EXPECT_GE(truncation_moment_gap(2, k).gap, 0.0);
}

TEST(SingularSandwich, OrderOneClosedForm) {
  // det [[mu, mu^2+1], [mu^2+1, mu^3+3mu]] = mu^2 - 1.
  for (long mu = 1; mu <= 5; ++mu) EXPECT_EQ(singular_value_sandwich(1, mu).det, BigInt(mu * mu - 1)) << mu;
  EXPECT_FALSE(singular_value_sandwich(1, 1).holds);
}

TEST(SingularSandwich, HoldsForSmallOrders) {
  for (int ell : {1, 3, 5}) {
    SingularSandwich s = singular_value_sandwich(ell, 2);
    EXPECT_TRUE(s.holds) << ell;
    EXPECT_NE(s.det, 0);
    EXPECT_LE(s.sigma_max, s.frobenius * (1 + 1e-12));
  }
}
