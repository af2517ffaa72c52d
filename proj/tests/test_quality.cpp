#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace bqrrp;

TEST(GenGaussian, Deterministic) {
  EXPECT_EQ(gen_gaussian(30, 20, 5), gen_gaussian(30, 20, 5));
  // entry (i, j) does not depend on the shape
  EXPECT_EQ(gen_gaussian(40, 25, 5)(29, 19), gen_gaussian(30, 20, 5)(29, 19));
}

TEST(GenGaussian, SampleStatistics) {
  DenseMatrix a = gen_gaussian(200, 200, 1);
  double s = 0, s2 = 0;
  for (double x : a.values()) {
    s += x;
    s2 += x * x;
  }
  const double n = 40000.0;
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_GE(mean, -0.05);
  EXPECT_LE(mean, 0.05);
  EXPECT_GE(var, 0.9);
  EXPECT_LE(var, 1.1);
}

TEST(GenGaussian, SeedsGiveDifferentMatrices) {
  DenseMatrix a = gen_gaussian(100, 100, 1);
  DenseMatrix b = gen_gaussian(100, 100, 2);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.values().size(); ++i) differ += a.values()[i] != b.values()[i];
  EXPECT_GE(static_cast<double>(differ), 0.99 * 10000);
}

TEST(GenKahan, PrintedFormSmallCases) {
  const double theta = 1.2, p = 10;
  DenseMatrix k1 = gen_kahan({1, p, theta});
  EXPECT_DOUBLE_EQ(k1(0, 0), -std::cos(theta) + oracle::u * p);
  DenseMatrix k2 = gen_kahan({2, 0, std::numbers::pi / 2});
  EXPECT_NEAR(k2(0, 0), 0.0, 1e-16);
  EXPECT_EQ(k2(0, 1), 1.0);
  EXPECT_EQ(k2(1, 0), 0.0);
  EXPECT_NEAR(k2(1, 1), 0.0, 1e-16);
}

TEST(GenKahan, PrintedFormStructure) {
  const std::int64_t n = 7;
  const double theta = 1.2, p = 1000;
  DenseMatrix k = gen_kahan({n, p, theta});
  const double s = std::sin(theta), c = -std::cos(theta);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      const double scale = std::pow(s, static_cast<double>(i));
      if (i > j) {
        EXPECT_EQ(k(i, j), 0.0);
      } else if (i < j) {
        EXPECT_NEAR(k(i, j), scale, 1e-15);
      } else {
        EXPECT_NEAR(k(i, j), scale * c + oracle::u * p * static_cast<double>(n - i), 1e-15);
      }
    }
}

TEST(GenKahan, ClassicalForm) {
  const std::int64_t n = 5;
  const double theta = 1.2;
  DenseMatrix k = gen_kahan({n, 0, theta}, true);
  const double s = std::sin(theta), c = std::cos(theta);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      const double scale = std::pow(s, static_cast<double>(i));
      if (i > j) {
        EXPECT_EQ(k(i, j), 0.0);
      } else if (i < j) {
        EXPECT_NEAR(k(i, j), -c * scale, 1e-15);
      } else {
        EXPECT_NEAR(k(i, j), scale, 1e-15);
      }
    }
}

TEST(GenKahan, RejectsBadParameters) {
  EXPECT_THROW(gen_kahan({0, 1, 1.2}), DimensionError);
  EXPECT_THROW(gen_kahan({4, 1, 0.0}), ConfigError);
  EXPECT_THROW(gen_kahan({4, 1, std::numbers::pi}), ConfigError);
}

TEST(GenKahan, PaperConfigurationIsFinite) {
  DenseMatrix k = gen_kahan({512, 1000, 1.2}, true);
  for (double x : k.values()) EXPECT_TRUE(std::isfinite(x));
  EXPECT_GT(k(511, 511), 0.0);
}

TEST(JacobiSvd, Examples) {
  auto s = jacobi_svd_values(DenseMatrix::from_rows({{3, 0, 0}, {0, 2, 0}, {0, 0, 1}}));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s[0], 3);
  EXPECT_DOUBLE_EQ(s[1], 2);
  EXPECT_DOUBLE_EQ(s[2], 1);
  auto t = jacobi_svd_values(DenseMatrix::from_rows({{3, 0}, {4, 0}}));
  EXPECT_DOUBLE_EQ(t[0], 5);
  EXPECT_EQ(t[1], 0);
}

TEST(JacobiSvd, OrthogonalInvariance) {
  std::mt19937_64 rng(80);
  DenseMatrix a = oracle::random_matrix(30, 12, rng);
  DenseMatrix g = oracle::random_matrix(30, 30, rng);
  std::vector<double> tau(30);
  qr_unpivoted(g.view(), tau);
  DenseMatrix q = oracle::explicit_q(g, tau, 30, 30);
  auto s1 = jacobi_svd_values(a);
  auto s2 = jacobi_svd_values(oracle::matmul(q, a));
  for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_NEAR(s1[i], s2[i], 1e-12 * s1[0]);
}

TEST(JacobiSvd, OrthonormalColumnsHaveUnitValues) {
  std::mt19937_64 rng(81);
  DenseMatrix g = oracle::random_matrix(100, 40, rng);
  std::vector<double> tau(40);
  qr_unpivoted(g.view(), tau);
  DenseMatrix q = oracle::explicit_q(g, tau, 40, 40);
  for (double s : jacobi_svd_values(q)) {
    EXPECT_GE(s, 1 - 1e-10);
    EXPECT_LE(s, 1 + 1e-10);
  }
}

TEST(JacobiSvd, KnownSpectrumAndWideInput) {
  std::mt19937_64 rng(82);
  const std::int64_t n = 20;
  auto orth = [&](std::int64_t m) {
    DenseMatrix g = oracle::random_matrix(m, m, rng);
    std::vector<double> tau(static_cast<std::size_t>(m));
    qr_unpivoted(g.view(), tau);
    return oracle::explicit_q(g, tau, m, m);
  };
  DenseMatrix u = orth(n), v = orth(n);
  DenseMatrix s(n, n);
  for (std::int64_t i = 0; i < n; ++i) s(i, i) = std::pow(2.0, -static_cast<double>(i));
  DenseMatrix a = oracle::matmul(oracle::matmul(u, s), v, false, true);
  auto sv = jacobi_svd_values(a);
  // forming A in double perturbs each value by about u * sigma_max
  for (std::int64_t i = 0; i < n; ++i) EXPECT_NEAR(sv[static_cast<std::size_t>(i)], s(i, i), 1e-14);
  auto svt = jacobi_svd_values(oracle::transpose(DenseMatrix::copy_of(a.sub(0, 0, 8, n))));
  auto svw = jacobi_svd_values(a.sub(0, 0, 8, n));
  ASSERT_EQ(svw.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(svw[i], svt[i], 1e-14);
}

TEST(JacobiSvd, SweepLimitRaisesConvergenceError) {
  std::mt19937_64 rng(83);
  DenseMatrix a = oracle::random_matrix(40, 40, rng);
  try {
    jacobi_svd_values(a, 1e-15, 1);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.achieved(), 1e-15);
  }
}

TEST(TrailingProfile, Examples) {
  auto f = trailing_frobenius_profile(DenseMatrix::identity(3));
  EXPECT_DOUBLE_EQ(f[0], std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(f[1], std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(f[2], 1.0);
  for (double x : trailing_frobenius_profile(DenseMatrix(4, 6))) EXPECT_EQ(x, 0.0);
}

TEST(TrailingProfile, MatchesDirectRecomputation) {
  std::mt19937_64 rng(84);
  for (auto [l, n] : {std::pair<std::int64_t, std::int64_t>{256, 256}, {40, 90}, {90, 40}}) {
    DenseMatrix r = oracle::upper(oracle::random_matrix(l, n, rng), l);
    auto f = trailing_frobenius_profile(r);
    ASSERT_EQ(static_cast<std::int64_t>(f.size()), std::min(l, n));
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto ii = static_cast<std::int64_t>(i);
      const double direct = oracle::frob(r.sub(ii, ii, l - ii, n - ii));
      EXPECT_LE(std::abs(f[i] - direct), 4.0 * oracle::u * direct + 1e-300);
      if (i > 0) {
        EXPECT_LE(f[i], f[i - 1]);
      }
    }
  }
}

TEST(DiagOverSigma, Examples) {
  std::vector<double> s1{2, 1};
  auto q = diag_over_sigma(DenseMatrix::from_rows({{2, 0}, {0, 1}}), s1);
  EXPECT_EQ(q, (std::vector<double>{1, 1}));
  std::vector<double> s2{1, 1e-3};
  auto q2 = diag_over_sigma(DenseMatrix::from_rows({{1, 0}, {0, 1e-3}}), s2);
  EXPECT_EQ(q2, (std::vector<double>{1, 1}));
}

TEST(DiagOverSigma, ZeroConventions) {
  std::vector<double> s{3, 0, 0};
  auto q = diag_over_sigma(DenseMatrix::from_rows({{-3, 1, 1}, {0, 0, 1}, {0, 0, 2}}), s);
  EXPECT_EQ(q[0], 1.0);
  EXPECT_EQ(q[1], 1.0);
  EXPECT_EQ(q[2], std::numeric_limits<double>::infinity());
  std::vector<double> too_short{1};
  EXPECT_THROW(diag_over_sigma(DenseMatrix::identity(2), too_short), DimensionError);
}

TEST(DiagOverSigma, ReferenceQrcpRespectsLowerBound) {
  for (const DenseMatrix& a : {gen_gaussian(60, 60, 3), gen_kahan({60, 10, 1.2}, true)}) {
    DenseMatrix f = a;
    std::vector<double> tau(60);
    PivotVector j(60);
    qrcp_reference(f.view(), tau, j);
    auto q = diag_over_sigma(upper_trapezoid(f), jacobi_svd_values(a));
    const double bound = 1.0 / std::sqrt(60.0 * 61.0 / 2.0);
    for (double x : q) EXPECT_GE(x, bound);
  }
}
