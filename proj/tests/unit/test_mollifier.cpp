#include <cmath>

#include <gtest/gtest.h>

#include "monotest/mollifier.hpp"

using namespace monotest;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  double h = (b - a) / m, s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

double raw_bump(double x) { return std::abs(x) < 1 ? std::exp(-1 / (1 - x * x)) : 0.0; }

}  // namespace

TEST(Bump, NormalizationMatchesQuadrature) {
  double integral = simpson(raw_bump, -1, 1, 200000);
  EXPECT_NEAR(Bump::instance().normalization(), 1 / integral, 1e-10);
  EXPECT_NEAR(Bump::instance().normalization(), 2.2522836, 1e-6);
}

TEST(Bump, CdfTableAgreesWithQuadrature) {
  const Bump& b = Bump::instance();
  for (double x : {-0.9, -0.3, 0.0, 0.25, 0.77}) {
    double ref = b.normalization() * simpson(raw_bump, -1, x, 20000);
    EXPECT_NEAR(b.cdf(x), ref, 1e-9) << x;
    EXPECT_NEAR(b.cdf_exact(x), ref, 1e-11) << x;
  }
  EXPECT_DOUBLE_EQ(b.cdf(-1.5), 0.0);
  EXPECT_DOUBLE_EQ(b.cdf(1.5), 1.0);
}

TEST(Mollifier1D, EndpointsAndMidpoint) {
  Mollifier1D phi(0.2);
  EXPECT_EQ(phi(0.0), 0.0);
  EXPECT_EQ(phi(-3.0), 0.0);
  EXPECT_EQ(phi(0.2), 1.0);
  EXPECT_EQ(phi(5.0), 1.0);
  EXPECT_NEAR(phi(0.1), 0.5, 1e-12);
  EXPECT_THROW(Mollifier1D(0.0), InvalidInput);
}

TEST(Mollifier1D, MonotoneAndSymmetric) {
  Mollifier1D phi(0.3);
  double prev = 0;
  for (int i = 0; i <= 300; ++i) {
    double x = 0.3 * i / 300;
    EXPECT_GE(phi(x), prev - 1e-15);
    prev = phi(x);
    EXPECT_NEAR(phi(x) + phi(0.3 - x), 1.0, 1e-10);
  }
}

TEST(Mollifier1D, FirstDerivativePeak) {
  // Peak of Phi' is (2/eps) * c * b-max, with b-max = exp(-1).
  double eps = 0.4;
  Mollifier1D phi(eps);
  EXPECT_NEAR(phi.derivative(eps / 2), 2 / eps * Bump::instance().normalization() / std::exp(1.0), 1e-12);
}

TEST(Alpha, ClosedValues) {
  const double e = std::exp(1.0);
  EXPECT_NEAR(alpha(1), 128 * e, 1e-10);
  EXPECT_NEAR(alpha(2) / (2 * e * 4096 * 2 * 64), 1.0, 1e-14);
  EXPECT_THROW(alpha(0), InvalidInput);
}

TEST(DerivativeBound, HoldsForSmallOrders) {
  for (int k = 1; k <= 3; ++k) {
    DerivativeReport r = derivative_bound_check(0.1, k, 2000);
    EXPECT_TRUE(r.holds) << k;
    EXPECT_GT(r.max_abs, 0.0);
  }
}

TEST(FdDerivative, PolynomialExact) {
  auto cube = [](double x) { return x * x * x; };
  EXPECT_NEAR(fd_derivative(cube, 0.7, 1, 1e-3), 3 * 0.49, 1e-8);
  EXPECT_NEAR(fd_derivative(cube, 0.7, 2, 1e-2), 6 * 0.7, 1e-6);
}

TEST(OrthantMollifier, ProductFormMatchesSum) {
  OrthantMollifier m(3, {0b000, 0b101, 0b111}, 0.25);
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    Vec x = Vec::NullaryExpr(3, [&](Eigen::Index) { return 0.6 * (rng.uniform() - 0.5); });
    EXPECT_NEAR(m(x), m.sum_form(x), 1e-14);
    EXPECT_GE(m(x), 0.0);
    EXPECT_LE(m(x), 1.0);
  }
}

TEST(OrthantMollifier, AllOrthantsSumToAtMostOne) {
  std::vector<std::uint64_t> all{0, 1, 2, 3};
  OrthantMollifier m(2, all, 0.2);
  Vec deep(2);
  deep << 0.5, -0.7;
  EXPECT_DOUBLE_EQ(m(deep), 1.0);
  Vec x(2);
  x << 0.05, -0.1;
  EXPECT_LE(m.sum_form(x), 1.0);
}

TEST(OrthantMollifier, RejectsDuplicates) {
  EXPECT_THROW(OrthantMollifier(2, {1, 1}, 0.1), InvalidInput);
  EXPECT_THROW(OrthantMollifier(std::vector<std::vector<int>>{{1, 0}}, 0.1), InvalidInput);
}

TEST(OrthantMollifier, SupportCheckPasses) {
  OrthantMollifier m(4, {0b1111, 0b0011}, 0.2);
  Rng rng(5);
  SupportReport r = psi_support_check(m, {0, 2}, 4000, rng);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.violations, 0);
}

TEST(BoxMollifier, SandwichesIndicator) {
  BoxMollifierPair box(0.1, 0.1, 3);
  Rng rng(7);
  for (int t = 0; t < 5000; ++t) {
    Vec x = Vec::NullaryExpr(3, [&](Eigen::Index) { return 0.8 * (rng.uniform() - 0.5); });
    double ind = box.in_box(x) ? 1.0 : 0.0;
    EXPECT_LE(box.psi_in(x), ind);
    EXPECT_GE(box.psi_out(x), ind);
  }
  EXPECT_DOUBLE_EQ(box.psi_in(Vec::Zero(3)), 1.0);
  EXPECT_DOUBLE_EQ(box.psi_out(Vec::Constant(3, 1.0)), 0.0);
}
