#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "monotest/orthants.hpp"

using namespace monotest;

namespace {

DiscreteRV rv(std::vector<double> atoms, std::vector<double> probs) {
  DiscreteRV r{std::move(atoms), std::move(probs)};
  r.validate();
  return r;
}

}  // namespace

TEST(PatternKey, ZeroMapsToPlus) {
  Vec v(3);
  v << 0.0, -1.0, 2.0;
  EXPECT_EQ(pattern_key(v), 0b101u);
  EXPECT_EQ(key_to_pattern(0b101u, 3), (std::vector<int>{1, -1, 1}));
  EXPECT_EQ(sign_pattern(v), (std::vector<int>{1, -1, 1}));
  Vec tiny(1);
  tiny << -1e-12;
  EXPECT_EQ(pattern_key(tiny, kZeroSnap), 1u);
  EXPECT_EQ(pattern_key(tiny), 0u);
}

TEST(TotalVariation, HandComputed) {
  SignPatternDistribution p{2, {{0, 0.5}, {1, 0.5}}};
  SignPatternDistribution q{2, {{1, 0.25}, {3, 0.75}}};
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.75);
  EXPECT_DOUBLE_EQ(total_variation(p, p), 0.0);
}

TEST(DuoExact, SingleColumnExample) {
  // n = 1, one row: u = +1 and v in {-1, +3} each with probability 1/2.
  QueryMatrix qm(Eigen::MatrixXi::Ones(1, 1));
  YesNoPair pair{1, 1, rv({1.0}, {1.0}), rv({-1.0, 3.0}, {0.5, 0.5})};
  EXPECT_DOUBLE_EQ(duo_exact_small(qm, pair).value, 0.5);
}

TEST(DuoExact, IdenticalRvsGiveZero) {
  Rng rng(3);
  QueryMatrix qm = QueryMatrix::random(4, 6, rng);
  DiscreteRV u = rv({-1.0, 0.5, 2.0}, {0.2, 0.5, 0.3});
  EXPECT_DOUBLE_EQ(duo_exact_small(qm, YesNoPair{1, 1, u, u}).value, 0.0);
}

TEST(DuoExact, BruteForceAgreement) {
  Rng rng(5);
  QueryMatrix qm = QueryMatrix::random(3, 4, rng);
  DiscreteRV u = rv({0.5, 1.5}, {0.5, 0.5});
  DiscreteRV v = rv({-0.5, 1.0, 2.5}, {0.25, 0.5, 0.25});
  // Independent enumeration over all coefficient vectors.
  auto dist = [&](const DiscreteRV& r) {
    std::map<std::uint64_t, double> m;
    int k = r.support_size();
    int total = 1;
    for (int j = 0; j < 4; ++j) total *= k;
    for (int code = 0; code < total; ++code) {
      Vec w(4);
      double p = 1;
      for (int j = 0, c = code; j < 4; ++j, c /= k) {
        w(j) = r.atoms[c % k];
        p *= r.probs[c % k];
      }
      Vec y = qm.signs().cast<double>() * w;
      std::uint64_t key = 0;
      for (int i = 0; i < 3; ++i)
        if (y(i) >= -1e-9) key |= std::uint64_t{1} << i;
      m[key] += p;
    }
    return m;
  };
  auto ps = dist(u), pt = dist(v);
  double tv = 0;
  for (std::uint64_t key = 0; key < 8; ++key) tv += std::abs(ps[key] - pt[key]);
  EXPECT_NEAR(duo_exact_small(qm, YesNoPair{1, 1, u, v}).value, 0.5 * tv, 1e-14);
}

TEST(DuoExact, EnumerationGuard) {
  Rng rng(1);
  QueryMatrix qm = QueryMatrix::random(2, 40, rng);
  DiscreteRV u = rv({-1.0, 1.0}, {0.5, 0.5});
  EXPECT_THROW(duo_exact_small(qm, YesNoPair{1, 1, u, u}), ResourceGuard);
}

TEST(DuoMonteCarlo, AgreesWithExact) {
  Rng rng(9);
  QueryMatrix qm = QueryMatrix::random(3, 6, rng);
  DiscreteRV u = rv({0.5, 1.5}, {0.5, 0.5});
  DiscreteRV v = rv({-1.0, 1.0, 3.0}, {0.25, 0.5, 0.25});
  YesNoPair pair{1, 1, u, v};
  double exact = duo_exact_small(qm, pair).value;
  DuoEstimate mc = duo_monte_carlo(qm, pair, 200000, Rng(11));
  EXPECT_EQ(mc.method, DuoMethod::MonteCarlo);
  EXPECT_NEAR(mc.value, exact, 5 * mc.stderr_ + mc.bias_bound);
  EXPECT_GT(mc.stderr_, 0.0);
  EXPECT_NEAR(mc.bias_bound, std::sqrt(8.0 / 200000), 1e-15);
}

TEST(DuoMonteCarlo, DeterministicAcrossWorkers) {
  Rng rng(2);
  QueryMatrix qm = QueryMatrix::random(4, 10, rng);
  DiscreteRV u = rv({-1.0, 1.0}, {0.3, 0.7});
  PatternCounts a = sample_pattern_counts(qm, u, 20000, Rng(4), 1);
  PatternCounts b = sample_pattern_counts(qm, u, 20000, Rng(4), 4);
  EXPECT_EQ(a, b);
}

TEST(DuoMonteCarlo, DuplicatedRowsPreserveDistance) {
  Rng rng(6);
  QueryMatrix qm = QueryMatrix::random(3, 5, rng);
  QueryMatrix dup = qm.select_rows({0, 1, 2, 0, 1});
  DiscreteRV u = rv({0.5, 1.5}, {0.5, 0.5});
  DiscreteRV v = rv({-1.0, 1.0, 3.0}, {0.25, 0.5, 0.25});
  YesNoPair pair{1, 1, u, v};
  EXPECT_DOUBLE_EQ(duo_exact_small(qm, pair).value, duo_exact_small(dup, pair).value);
}

TEST(GaussianBox, IdentityIsProductOfCdfs) {
  Mat a = Mat::Identity(3, 3) * 0.5;
  Vec lo = Vec::Constant(3, -0.3), hi = Vec::Constant(3, 0.6);
  double mu = 0.2;
  // Mean mu * A 1 = 0.1 per coordinate, standard deviation 0.5.
  double p1 = normal_cdf((0.6 - 0.1) / 0.5) - normal_cdf((-0.3 - 0.1) / 0.5);
  Estimate e = gaussian_box_prob(a, mu, lo, hi, 200000, Rng(7));
  EXPECT_NEAR(e.value, p1 * p1 * p1, 5 * e.stderr_);
}

TEST(Psi, ExpectationInUnitInterval) {
  Rng rng(12);
  QueryMatrix qm = QueryMatrix::random(3, 16, rng);
  DiscreteRV u = rv({0.5, 1.5}, {0.5, 0.5});
  OrthantMollifier psi(3, {0b111, 0b000}, 0.1);
  Estimate e = psi_expectation(qm, u, psi, 5000, Rng(1));
  EXPECT_GE(e.value, 0.0);
  EXPECT_LE(e.value, 1.0);
}

TEST(Psi, StepGapZeroWhenRvsCoincide) {
  Rng rng(13);
  QueryMatrix qm = QueryMatrix::random(3, 16, rng);
  DiscreteRV u = rv({0.5, 1.5}, {0.5, 0.5});
  OrthantMollifier psi(3, {0b111}, 0.1);
  Estimate g = lindeberg_step_gap(qm, YesNoPair{1, 1, u, u}, psi, 4, 2000, Rng(2));
  EXPECT_NEAR(g.value, 0.0, 1e-15);
}
