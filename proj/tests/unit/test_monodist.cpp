#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "monotest/monodist.hpp"

using namespace monotest;

namespace {

// Brute-force oracle at n = 3: all 256 functions, 20 of them monotone.
std::vector<std::uint32_t> monotone_functions(int n) {
  const int N = 1 << n;
  std::vector<std::uint32_t> out;
  for (std::uint64_t f = 0; f < (std::uint64_t{1} << N); ++f) {
    bool ok = true;
    for (int x = 0; x < N && ok; ++x)
      for (int y = 0; y < N && ok; ++y)
        if ((x & ~y) == 0 && ((f >> x) & 1) > ((f >> y) & 1)) ok = false;
    if (ok) out.push_back(static_cast<std::uint32_t>(f));
  }
  return out;
}

TruthTable table_of(int n, std::uint32_t f) {
  return TruthTable::from_function(n, [&](std::uint64_t x) { return ((f >> x) & 1) ? 1 : -1; });
}

}  // namespace

TEST(Monotone, DedekindCounts) {
  EXPECT_EQ(monotone_functions(2).size(), 6u);
  EXPECT_EQ(monotone_functions(3).size(), 20u);
}

TEST(Monotone, IsMonotoneMatchesBruteForce) {
  auto mono = monotone_functions(3);
  std::set<std::uint32_t> ms(mono.begin(), mono.end());
  for (std::uint32_t f = 0; f < 256; ++f) EXPECT_EQ(is_monotone(table_of(3, f)), ms.count(f) > 0) << f;
}

TEST(ExactDistance, AllFunctionsOnThreeBits) {
  auto mono = monotone_functions(3);
  for (std::uint32_t f = 0; f < 256; ++f) {
    int best = 8;
    for (auto m : mono) best = std::min(best, __builtin_popcount(f ^ m));
    EXPECT_EQ(exact_distance_to_monotone(table_of(3, f)), boost::rational<std::int64_t>(best, 8)) << f;
  }
}

TEST(ExactDistance, AntiDictatorIsHalf) {
  TruthTable t = TruthTable::from_function(5, [](std::uint64_t x) { return (x & 1) ? -1 : 1; });
  EXPECT_EQ(exact_distance_to_monotone(t), boost::rational<std::int64_t>(1, 2));
  EXPECT_FALSE(is_monotone(t));
}

TEST(Fourier, DictatorAndMajority) {
  TruthTable dict = TruthTable::from_function(4, [](std::uint64_t x) { return (x >> 2 & 1) ? 1 : -1; });
  Vec f = fourier_degree1(dict);
  EXPECT_DOUBLE_EQ(f(2), 1.0);
  EXPECT_DOUBLE_EQ(f(0), 0.0);
  TruthTable maj = TruthTable::from_ltf(LTF{Vec::Ones(3)});
  EXPECT_DOUBLE_EQ(fourier_degree1(maj)(0), 0.5);
  EXPECT_DOUBLE_EQ(fourier_negative_mass(maj), 0.0);
}

TEST(Fourier, NegativeMassLowerBoundsDistance) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    LTF f{Vec::NullaryExpr(8, [&](Eigen::Index) { return rng.normal(); })};
    TruthTable tt = TruthTable::from_ltf(f);
    EXPECT_GE(boost::rational_cast<double>(exact_distance_to_monotone(tt)) + 1e-15, 0.25 * fourier_negative_mass(tt));
  }
}

TEST(Fourier, SampledWithinErrorBars) {
  Rng rng(4);
  LTF f{(Vec(5) << 1.0, -0.5, 2.0, 0.3, -1.2).finished()};
  Vec exact = fourier_degree1(TruthTable::from_ltf(f));
  auto est = fourier_degree1_sampled(f, 200000, rng);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(est[i].value, exact(i), 5 * est[i].stderr_ + 1e-12);
}

TEST(Hermite, ClosedFormForLtf) {
  // E[sign(w.G) G_i] = sqrt(2/pi) w_i / |w|.
  Vec w(3);
  w << 1.0, -2.0, 0.5;
  Vec h = hermite_degree1(LTF{w});
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(h(i), std::sqrt(2 / M_PI) * w(i) / w.norm(), 1e-12);
}

TEST(Regularity, MaxWeightFraction) {
  Vec w(4);
  w << 3, 4, 0, 0;
  EXPECT_DOUBLE_EQ(regularity(LTF{w}), 0.8);
}

TEST(EdgeTester, AcceptsMonotoneRejectsAntiDictator) {
  Rng rng(8);
  CubeOracle maj = [](const Eigen::VectorXi& x) { return x.sum() >= 0 ? 1 : -1; };
  CubeOracle anti = [](const Eigen::VectorXi& x) { return -x(0); };
  EXPECT_TRUE(edge_tester(maj, 7, 500, rng).accept);
  EdgeTestResult r = edge_tester(anti, 7, 500, rng);
  EXPECT_FALSE(r.accept);
  EXPECT_GE(r.first_hit, 0);
}

TEST(TruthTable, DimensionGuard) {
  EXPECT_THROW(TruthTable::from_ltf(LTF{Vec::Ones(kMaxExactDimension + 1)}), ResourceGuard);
}
