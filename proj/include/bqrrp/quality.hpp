#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "blas.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "sketch.hpp"

namespace bqrrp {

/// i.i.d. standard normal entries; entry (i, j) depends only on (seed, i, j).
inline DenseMatrix gen_gaussian(std::int64_t m, std::int64_t n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw DimensionError("gen_gaussian: empty shape");
  DenseMatrix a(m, n);
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t i = 0; i < m; ++i) a(i, j) = gaussian_entry(seed, i, j);
  return a;
}

struct KahanParams {
  std::int64_t n = 1;
  double p = 0.0;
  double theta = 1.2;
};

/// Kahan matrix of order n.
///
/// Default form: diag(1, a, ..., a^{n-1}) * U + u*p*diag(n, ..., 1) with
/// a = sin(theta) and U upper triangular, -cos(theta) on the diagonal and 1
/// above. With `classical` set, U has 1 on the diagonal and -cos(theta)
/// above (the gallery convention).
inline DenseMatrix gen_kahan(const KahanParams& k, bool classical = false) {
  if (k.n < 1) throw DimensionError("gen_kahan: n must be >= 1");
  if (!(k.theta > 0.0 && k.theta < std::numbers::pi))
    throw ConfigError("gen_kahan: theta must lie in (0, pi)");
  const double s = std::sin(k.theta);
  const double c = -std::cos(k.theta);
  const double on_diag = classical ? 1.0 : c;
  const double above = classical ? c : 1.0;
  DenseMatrix a(k.n, k.n);
  double scale = 1.0;
  for (std::int64_t i = 0; i < k.n; ++i) {
    a(i, i) = scale * on_diag + unit_roundoff * k.p * static_cast<double>(k.n - i);
    for (std::int64_t j = i + 1; j < k.n; ++j) a(i, j) = scale * above;
    scale *= s;
  }
  return a;
}

/// Singular values by one-sided Jacobi, sorted descending
/// (min(m, n) values).
inline std::vector<double> jacobi_svd_values(ConstMatrixView m, double tol = 1e-15,
                                             int max_sweeps = 30) {
  DenseMatrix a = m.rows() >= m.cols() ? DenseMatrix::copy_of(m) : transpose_copy(m);
  const std::int64_t rows = a.rows();
  const std::int64_t n = a.cols();
  std::vector<double> sq(static_cast<std::size_t>(n));
  auto col_sq = [&](std::int64_t j) {
    const double nrm = norm2(a.view().col(j));
    return nrm * nrm;
  };
  for (std::int64_t j = 0; j < n; ++j) sq[static_cast<std::size_t>(j)] = col_sq(j);

  double worst = 0.0;
  bool converged = n < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    worst = 0.0;
    for (std::int64_t p = 0; p + 1 < n; ++p) {
      for (std::int64_t q = p + 1; q < n; ++q) {
        double& app = sq[static_cast<std::size_t>(p)];
        double& aqq = sq[static_cast<std::size_t>(q)];
        if (app == 0.0 || aqq == 0.0) continue;
        double* cp = a.col_ptr(p);
        double* cq = a.col_ptr(q);
        double apq = 0.0;
        for (std::int64_t i = 0; i < rows; ++i) apq += cp[i] * cq[i];
        const double cosine = std::abs(apq) / std::sqrt(app * aqq);
        worst = std::max(worst, cosine);
        if (cosine <= tol) continue;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double cs = 1.0 / std::hypot(1.0, t);
        const double sn = cs * t;
        for (std::int64_t i = 0; i < rows; ++i) {
          const double x = cp[i];
          const double y = cq[i];
          cp[i] = cs * x - sn * y;
          cq[i] = sn * x + cs * y;
        }
        app = col_sq(p);
        aqq = col_sq(q);
      }
    }
    converged = worst <= tol;
  }
  if (!converged)
    throw ConvergenceError("jacobi_svd_values: no convergence after sweep limit", worst);
  std::vector<double> sv(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) sv[static_cast<std::size_t>(j)] = norm2(a.view().col(j));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

/// f(i) = ||R(i:, i:)||_F for i < min(rows, cols), one reverse pass.
inline std::vector<double> trailing_frobenius_profile(ConstMatrixView r) {
  const std::int64_t len = std::min(r.rows(), r.cols());
  std::vector<double> f(static_cast<std::size_t>(len), 0.0);
  if (len == 0) return f;
  // Power-of-two scaling keeps the division exact; Neumaier summation keeps
  // the running sum accurate to a few ulps regardless of term count.
  const double amax = max_abs(r);
  if (amax == 0.0) return f;
  const double scale = std::ldexp(1.0, std::ilogb(amax));
  double acc = 0.0, comp = 0.0;
  auto add = [&](double x) {
    const double t = acc + x;
    comp += std::abs(acc) >= std::abs(x) ? (acc - t) + x : (x - t) + acc;
    acc = t;
  };
  for (std::int64_t i = len - 1; i >= 0; --i) {
    // Row i from column i on, plus column i below row i.
    for (std::int64_t j = i; j < r.cols(); ++j) {
      const double x = r(i, j) / scale;
      add(x * x);
    }
    for (std::int64_t k = i + 1; k < r.rows(); ++k) {
      const double x = r(k, i) / scale;
      add(x * x);
    }
    f[static_cast<std::size_t>(i)] = scale * std::sqrt(acc + comp);
  }
  return f;
}

/// q(i) = |R(i,i)| / sigma_i. 0/0 counts as 1, x/0 as +infinity.
inline std::vector<double> diag_over_sigma(ConstMatrixView r, std::span<const double> sigma) {
  const std::int64_t len = std::min(r.rows(), r.cols());
  if (static_cast<std::int64_t>(sigma.size()) < len)
    throw DimensionError("diag_over_sigma: too few singular values");
  std::vector<double> q(static_cast<std::size_t>(len));
  for (std::int64_t i = 0; i < len; ++i) {
    const double d = std::abs(r(i, i));
    const double s = sigma[static_cast<std::size_t>(i)];
    if (s == 0.0)
      q[static_cast<std::size_t>(i)] = d == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else
      q[static_cast<std::size_t>(i)] = d / s;
  }
  return q;
}

}  // namespace bqrrp
