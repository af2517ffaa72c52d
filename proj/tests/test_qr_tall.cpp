#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace bqrrp;

namespace {

using Ivec = std::vector<std::int64_t>;

// Panel permuted by the sketch's pivots, plus the sketch's R factor.
struct SketchedPanel {
  DenseMatrix panel;
  DenseMatrix r_sk;
};

SketchedPanel sketched(const DenseMatrix& p, std::uint64_t seed, std::int64_t d = 0) {
  const std::int64_t b = p.cols();
  if (d == 0) d = b;
  DenseMatrix sk = sketch_apply(GaussianSketchOp{d, p.rows(), seed}, p);
  Ivec j(static_cast<std::size_t>(b));
  WideQrcpWorkspace ws(d, b, WideVariant::LuQr);
  qrcp_wide(WideVariant::LuQr, sk.view(), j, ws);
  return {oracle::gather(p, j), oracle::upper(sk, b)};
}

double panel_residual(const DenseMatrix& orig, const DenseMatrix& f, const std::vector<double>& tau,
                      std::int64_t k) {
  DenseMatrix q = oracle::explicit_q(f, tau, k, k);
  DenseMatrix r = oracle::upper(f, k);
  DenseMatrix lead = DenseMatrix::copy_of(orig.sub(0, 0, orig.rows(), orig.cols()));
  return oracle::frob(oracle::minus(lead, oracle::matmul(q, r)));
}

double cond(const DenseMatrix& a) {
  auto sv = jacobi_svd_values(a);
  return sv.front() / sv.back();
}

DenseMatrix orthonormal(std::int64_t m, std::int64_t k, std::mt19937_64& rng) {
  DenseMatrix a = oracle::random_matrix(m, k, rng);
  std::vector<double> tau(static_cast<std::size_t>(k));
  qr_unpivoted(a.view(), tau);
  return oracle::explicit_q(a, tau, k, k);
}

}  // namespace

TEST(Precondition, Examples) {
  std::mt19937_64 rng(50);
  DenseMatrix p = oracle::random_matrix(7, 3, rng);
  DenseMatrix p0 = p;
  precondition(p.view(), DenseMatrix::identity(3));
  EXPECT_EQ(p, p0);
  DenseMatrix s = DenseMatrix::from_rows({{3}, {4}});
  precondition(s.view(), DenseMatrix::from_rows({{5}}));
  EXPECT_DOUBLE_EQ(s(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(s(1, 0), 0.8);
  DenseMatrix z = DenseMatrix::from_rows({{1, 0}, {0, 0}});
  EXPECT_THROW(precondition(s.view(), DenseMatrix::from_rows({{0}})), SingularError);
  EXPECT_THROW(precondition(p.view(), z), DimensionError);
}

// With d = b the preconditioned panel is as conditioned as a square Gaussian
// matrix (growing with b), so the check uses a 2b-row sketch.
TEST(Precondition, SketchedPanelIsWellConditioned) {
  std::mt19937_64 rng(51);
  for (std::int64_t b : {8, 16, 32, 64}) {
    // graded columns so the raw panel is poorly conditioned
    DenseMatrix p = oracle::random_matrix(4 * b, b, rng);
    for (std::int64_t j = 0; j < b; ++j)
      for (std::int64_t i = 0; i < 4 * b; ++i) p(i, j) *= std::pow(10.0, -6.0 * j / b);
    auto sp = sketched(p, 5 + static_cast<std::uint64_t>(b), 2 * b);
    DenseMatrix pre = sp.panel;
    precondition(pre.view(), sp.r_sk);
    EXPECT_GT(cond(p), 1e4);
    EXPECT_LE(cond(pre), 10.0) << "b=" << b;
  }
}

TEST(CholQr, Examples) {
  DenseMatrix m = DenseMatrix::from_rows({{3}, {4}});
  DenseMatrix r(1, 1);
  cholqr(m.view(), r.view());
  EXPECT_DOUBLE_EQ(m(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(m(1, 0), 0.8);
  EXPECT_DOUBLE_EQ(r(0, 0), 5.0);

  std::mt19937_64 rng(52);
  DenseMatrix q = orthonormal(20, 5, rng);
  DenseMatrix qc = q;
  DenseMatrix r5(5, 5);
  cholqr(qc.view(), r5.view());
  EXPECT_LE(oracle::max_diff(r5, DenseMatrix::identity(5)), 10 * 5 * oracle::u);
  EXPECT_LE(oracle::max_diff(qc, q), 10 * 5 * oracle::u);
}

TEST(CholQr, RandomWellConditioned) {
  std::mt19937_64 rng(53);
  DenseMatrix m = oracle::random_matrix(256, 16, rng);
  DenseMatrix q = m;
  DenseMatrix r(16, 16);
  cholqr(q.view(), r.view());
  EXPECT_LE(oracle::frob(oracle::minus(m, oracle::matmul(q, r))) / oracle::frob(m), 1e-13);
  EXPECT_LE(oracle::orth_error(q), 1e-13);
}

TEST(CholQr, BreakdownCarriesIndex) {
  DenseMatrix m = DenseMatrix::from_rows({{1, 0, 2}, {2, 0, 1}, {3, 0, 0}});
  DenseMatrix r(3, 3);
  try {
    cholqr(m.view(), r.view());
    FAIL();
  } catch (const CholeskyBreakdown& e) {
    EXPECT_EQ(e.index(), 1);
  }
  DenseMatrix dup = DenseMatrix::from_rows({{1, 1}, {2, 2}, {3, 3.0000000000000004}});
  EXPECT_THROW(cholqr(dup.view(), r.sub(0, 0, 2, 2)), CholeskyBreakdown);
}

TEST(HouseholderReconstruct, IdentityTwo) {
  DenseMatrix q = DenseMatrix::identity(2);
  std::vector<double> tau(2), d(2);
  householder_reconstruct(q.view(), tau, d);
  DenseMatrix h = oracle::explicit_q(q, tau, 2, 2);
  for (std::int64_t j = 0; j < 2; ++j) {
    EXPECT_TRUE(d[static_cast<std::size_t>(j)] == 1.0 || d[static_cast<std::size_t>(j)] == -1.0);
    for (std::int64_t i = 0; i < 2; ++i)
      EXPECT_LE(std::abs(h(i, j) - d[static_cast<std::size_t>(j)] * (i == j ? 1.0 : 0.0)), 16 * oracle::u);
  }
}

TEST(HouseholderReconstruct, SingleColumn) {
  DenseMatrix q = DenseMatrix::from_rows({{0}, {1}});
  std::vector<double> tau(1), d(1);
  householder_reconstruct(q.view(), tau, d);
  DenseMatrix h = oracle::explicit_q(q, tau, 1, 1);
  EXPECT_NEAR(h(0, 0), 0.0, 4 * oracle::u);
  EXPECT_NEAR(h(1, 0), d[0], 4 * oracle::u);
}

TEST(HouseholderReconstruct, RandomOrthonormalRoundTrip) {
  std::mt19937_64 rng(54);
  for (auto [m, k] : {std::pair<std::int64_t, std::int64_t>{64, 8}, {256, 16}, {30, 30}, {100, 1}}) {
    DenseMatrix q = orthonormal(m, k, rng);
    DenseMatrix v = q;
    std::vector<double> tau(static_cast<std::size_t>(k)), d(static_cast<std::size_t>(k));
    householder_reconstruct(v.view(), tau, d);
    DenseMatrix h = oracle::explicit_q(v, tau, k, k);
    double worst = 0;
    for (std::int64_t j = 0; j < k; ++j) {
      double s = 0;
      for (std::int64_t i = 0; i < m; ++i) {
        const double e = h(i, j) - d[static_cast<std::size_t>(j)] * q(i, j);
        s += e * e;
      }
      worst = std::max(worst, std::sqrt(s));
    }
    EXPECT_LE(worst, 50.0 * m * oracle::u);
    EXPECT_LE(worst, 1e-12);
    for (double t : tau) {
      EXPECT_GE(t, 1.0 - 1e-12);
      EXPECT_LE(t, 2.0 + 1e-12);
    }
  }
}

TEST(Unprecondition, Examples) {
  DenseMatrix r_sk = DenseMatrix::from_rows({{2, 1, 3}, {0, 5, 4}});
  DenseMatrix dest(2, 3, -7.0);
  std::vector<double> plus{1, 1};
  unprecondition(DenseMatrix::identity(2), plus, r_sk, dest.view());
  EXPECT_EQ(dest(0, 0), 2);
  EXPECT_EQ(dest(0, 2), 3);
  EXPECT_EQ(dest(1, 1), 5);
  EXPECT_EQ(dest(1, 0), -7.0);  // strict lower part is left alone

  DenseMatrix one(1, 1);
  std::vector<double> minus{-1};
  unprecondition(DenseMatrix::from_rows({{5}}), minus, DenseMatrix::from_rows({{2}}), one.view());
  EXPECT_EQ(one(0, 0), -10.0);
}

TEST(Unprecondition, MatchesDenseProduct) {
  std::mt19937_64 rng(55);
  DenseMatrix rc = oracle::random_upper(6, rng);
  DenseMatrix rs = oracle::upper(oracle::random_matrix(6, 9, rng), 6);
  std::vector<double> d{1, -1, -1, 1, 1, -1};
  DenseMatrix dest(6, 9);
  unprecondition(rc, d, rs, dest.view());
  DenseMatrix dr = rc;
  for (std::int64_t i = 0; i < 6; ++i)
    for (std::int64_t j = 0; j < 6; ++j) dr(i, j) *= d[static_cast<std::size_t>(i)];
  DenseMatrix ref = oracle::matmul(dr, rs);
  EXPECT_LE(oracle::max_diff(oracle::upper(dest, 6), ref), 1e-14 * oracle::absmax(ref) * 10);
}

TEST(QrTallHqr, DelegatesToUnpivotedQr) {
  std::mt19937_64 rng(56);
  DenseMatrix p = oracle::random_matrix(128, 16, rng);
  DenseMatrix f = p;
  std::vector<double> tau(16);
  qr_tall_hqr(f.view(), tau);
  DenseMatrix g = p;
  std::vector<double> tau2(16);
  qr_unpivoted(g.view(), tau2);
  EXPECT_EQ(f, g);
  EXPECT_LE(panel_residual(p, f, tau, 16) / oracle::frob(p), 1e-13);
  DenseMatrix id = DenseMatrix::identity(4);
  qr_tall_hqr(id.view(), std::span<double>(tau.data(), 4));
  EXPECT_EQ(id, DenseMatrix::identity(4));
}

TEST(QrTallCqr, BothPathsOnGradedOrthonormalPanel) {
  std::mt19937_64 rng(57);
  const std::int64_t m = 200, b = 12;
  DenseMatrix q = orthonormal(m, b, rng);
  DenseMatrix p = q;
  for (std::int64_t j = 0; j < b; ++j)
    for (std::int64_t i = 0; i < m; ++i) p(i, j) *= std::pow(10.0, -0.8 * static_cast<double>(j));
  auto sp = sketched(p, 9);
  CholQrWorkspace ws(b);
  DenseMatrix fc = sp.panel, fh = sp.panel;
  std::vector<double> tc(b), th(b);
  EXPECT_FALSE(qr_tall_cqr(fc.view(), sp.r_sk, b, tc, ws));
  qr_tall_hqr(fh.view(), th);
  const double nrm = oracle::frob(sp.panel);
  EXPECT_LE(panel_residual(sp.panel, fc, tc, b) / nrm, 1e-11);
  EXPECT_LE(panel_residual(sp.panel, fh, th, b) / nrm, 1e-11);
}

TEST(QrTallCqr, IdentitySketchOnOrthonormalPanel) {
  std::mt19937_64 rng(58);
  const std::int64_t k = 6;
  DenseMatrix q = orthonormal(40, k, rng);
  CholQrWorkspace ws(k);
  std::vector<double> tau(k);
  DenseMatrix f = q;
  EXPECT_FALSE(qr_tall_cqr(f.view(), DenseMatrix::identity(k), k, tau, ws));
  for (std::int64_t i = 0; i < k; ++i)
    for (std::int64_t j = i; j < k; ++j)
      EXPECT_NEAR(i == j ? std::abs(f(i, j)) : f(i, j), i == j ? 1.0 : 0.0, 10 * k * oracle::u);
}

TEST(QrTallCqr, DependentColumnTriggersFallback) {
  std::mt19937_64 rng(59);
  const std::int64_t m = 50, b = 4, k = 3;
  DenseMatrix p = oracle::random_matrix(m, b, rng);
  for (std::int64_t i = 0; i < m; ++i) p(i, 1) = p(i, 0);
  CholQrWorkspace ws(b);
  std::vector<double> tau(b);
  DenseMatrix f = p;
  EXPECT_TRUE(qr_tall_cqr(f.view(), DenseMatrix::identity(b), k, tau, ws));
  EXPECT_LE(panel_residual(p, f, tau, b) / oracle::frob(p), 1e-13);
}

TEST(QrTallCqr, ZeroRankUsesHouseholder) {
  std::mt19937_64 rng(60);
  DenseMatrix p = oracle::random_matrix(10, 3, rng);
  CholQrWorkspace ws(3);
  std::vector<double> tau(3);
  DenseMatrix f = p;
  EXPECT_TRUE(qr_tall_cqr(f.view(), DenseMatrix::identity(3), 0, tau, ws));
}

TEST(QrTall, PathEquivalenceOnRandomPanels) {
  std::mt19937_64 rng(61);
  const std::int64_t m = 256, b = 16;
  CholQrWorkspace ws(b);
  for (int t = 0; t < 20; ++t) {
    DenseMatrix p = oracle::random_matrix(m, b, rng);
    auto sp = sketched(p, static_cast<std::uint64_t>(100 + t));
    DenseMatrix fc = sp.panel, fh = sp.panel;
    std::vector<double> tc(b), th(b);
    EXPECT_FALSE(qr_tall_cqr(fc.view(), sp.r_sk, b, tc, ws));
    qr_tall_hqr(fh.view(), th);
    const double bound = 100.0 * m * oracle::u * oracle::frob(sp.panel);
    EXPECT_LE(panel_residual(sp.panel, fc, tc, b), bound);
    EXPECT_LE(panel_residual(sp.panel, fh, th, b), bound);
    EXPECT_LE(oracle::orth_error(oracle::explicit_q(fc, tc, b, b)), 100.0 * m * oracle::u);
  }
}
