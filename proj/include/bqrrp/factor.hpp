#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

#include "blas.hpp"
#include "errors.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "pivot_vector.hpp"

namespace bqrrp {

// ---------------------------------------------------------------------------
// LU with partial pivoting

namespace detail {

inline void swap_rows(MatrixView a, std::int64_t r1, std::int64_t r2) {
  if (r1 == r2) return;
  for (std::int64_t j = 0; j < a.cols(); ++j) std::swap(a(r1, j), a(r2, j));
}

// Unblocked right-looking LU of a p-by-q panel. Pivots are panel-relative,
// one-based. A column that is exactly zero from the diagonal down keeps its
// row in place and is skipped.
inline void lu_unblocked(MatrixView a, std::span<std::int64_t> ipiv) {
  const std::int64_t p = a.rows();
  const std::int64_t q = a.cols();
  const std::int64_t k = std::min(p, q);
  for (std::int64_t j = 0; j < k; ++j) {
    std::int64_t piv = j;
    double best = std::abs(a(j, j));
    for (std::int64_t i = j + 1; i < p; ++i) {
      const double x = std::abs(a(i, j));
      if (x > best) {
        best = x;
        piv = i;
      }
    }
    ipiv[static_cast<std::size_t>(j)] = piv + 1;
    if (best == 0.0) continue;
    swap_rows(a, j, piv);
    const double inv = 1.0 / a(j, j);
    double* cj = a.col_ptr(j);
    for (std::int64_t i = j + 1; i < p; ++i) cj[i] *= inv;
    for (std::int64_t c = j + 1; c < q; ++c) {
      double* cc = a.col_ptr(c);
      const double f = cc[j];
      if (f == 0.0) continue;
      for (std::int64_t i = j + 1; i < p; ++i) cc[i] -= cj[i] * f;
    }
  }
}

}  // namespace detail

/// In-place LU with partial pivoting (GETRF layout): unit-lower L strictly
/// below the diagonal, U on and above. ipiv (length >= min(p, q)) receives
/// the one-based row interchanges: row i was swapped with row ipiv[i] - 1.
///
/// Singular input is not an error; an exactly-zero pivot column is recorded
/// as ipiv[i] = i + 1 and leaves a zero on U's diagonal. Returns the number
/// of such columns.
inline std::int64_t lu_partial_pivot(MatrixView a, std::span<std::int64_t> ipiv,
                                     std::int64_t panel = kDefaultPanel) {
  const std::int64_t p = a.rows();
  const std::int64_t q = a.cols();
  const std::int64_t k = std::min(p, q);
  if (static_cast<std::int64_t>(ipiv.size()) < k)
    throw DimensionError("lu_partial_pivot: ipiv shorter than min(p, q)");
  std::int64_t zero_pivots = 0;
  for (std::int64_t j0 = 0; j0 < k; j0 += panel) {
    const std::int64_t jb = std::min(panel, k - j0);
    auto piv = ipiv.subspan(static_cast<std::size_t>(j0), static_cast<std::size_t>(jb));
    detail::lu_unblocked(a.sub(j0, j0, p - j0, jb), piv);
    for (std::int64_t i = 0; i < jb; ++i) {
      auto& v = piv[static_cast<std::size_t>(i)];
      if (v == i + 1 && a(j0 + i, j0 + i) == 0.0) ++zero_pivots;
      v += j0;
      const std::int64_t r = v - 1;
      if (r != j0 + i) {
        if (j0 > 0) detail::swap_rows(a.sub(0, 0, p, j0), j0 + i, r);
        if (j0 + jb < q)
          detail::swap_rows(a.sub(0, j0 + jb, p, q - j0 - jb), j0 + i, r);
      }
    }
    if (j0 + jb < q) {
      MatrixView u12 = a.sub(j0, j0 + jb, jb, q - j0 - jb);
      trsm(Side::Left, Uplo::Lower, Op::NoTrans, Diag::Unit, a.sub(j0, j0, jb, jb), u12);
      if (j0 + jb < p)
        gemm(-1.0, a.sub(j0 + jb, j0, p - j0 - jb, jb), Op::NoTrans, u12,
             Op::NoTrans, 1.0, a.sub(j0 + jb, j0 + jb, p - j0 - jb, q - j0 - jb));
    }
  }
  return zero_pivots;
}

// ---------------------------------------------------------------------------
// Cholesky

/// Upper Cholesky G = R^T R in place; the strict lower triangle is zeroed.
/// Returns the zero-based index of the first non-positive pivot on failure,
/// in which case the leading index-by-index block holds a valid factor.
inline std::optional<std::int64_t> cholesky(MatrixView g) {
  const std::int64_t k = g.rows();
  if (g.cols() != k) throw DimensionError("cholesky: matrix not square");
  for (std::int64_t j = 0; j < k; ++j) {
    double s = g(j, j);
    for (std::int64_t p = 0; p < j; ++p) s -= g(p, j) * g(p, j);
    if (!(s > 0.0)) return j;
    const double rjj = std::sqrt(s);
    g(j, j) = rjj;
    for (std::int64_t i = j + 1; i < k; ++i) {
      double t = g(j, i);
      for (std::int64_t p = 0; p < j; ++p) t -= g(p, j) * g(p, i);
      g(j, i) = t / rjj;
    }
    for (std::int64_t i = j + 1; i < k; ++i) g(i, j) = 0.0;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reference QR with column pivoting (GEQP3 semantics, level-2)

/// Greedy column-pivoted Householder QR in place.
///
/// At step i the remaining column with the largest updated 2-norm (lowest
/// index on ties) is swapped to position i. Norms are downdated and
/// recomputed from scratch once the downdated square drops below
/// sqrt(u) times the square recorded at the last recomputation.
/// jpvt is overwritten with the gather-form permutation.
inline void qrcp_reference(MatrixView a, std::span<double> tau,
                           std::span<std::int64_t> jpvt) {
  const std::int64_t m = a.rows();
  const std::int64_t n = a.cols();
  const std::int64_t k = std::min(m, n);
  if (static_cast<std::int64_t>(tau.size()) < k || static_cast<std::int64_t>(jpvt.size()) != n)
    throw DimensionError("qrcp_reference: tau/jpvt size");
  for (std::int64_t j = 0; j < n; ++j) jpvt[static_cast<std::size_t>(j)] = j + 1;
  Workspace vn1(static_cast<std::size_t>(n));
  Workspace vn2(static_cast<std::size_t>(n));
  Workspace w(static_cast<std::size_t>(std::max<std::int64_t>(n, 1)));
  for (std::int64_t j = 0; j < n; ++j) {
    vn1[static_cast<std::size_t>(j)] = norm2(a.col(j));
    vn2[static_cast<std::size_t>(j)] = vn1[static_cast<std::size_t>(j)];
  }
  const double tol3z = std::sqrt(unit_roundoff);
  for (std::int64_t i = 0; i < k; ++i) {
    std::int64_t pvt = i;
    for (std::int64_t j = i + 1; j < n; ++j)
      if (vn1[static_cast<std::size_t>(j)] > vn1[static_cast<std::size_t>(pvt)]) pvt = j;
    if (pvt != i) {
      std::swap_ranges(a.col_ptr(i), a.col_ptr(i) + m, a.col_ptr(pvt));
      std::swap(jpvt[static_cast<std::size_t>(i)], jpvt[static_cast<std::size_t>(pvt)]);
      std::swap(vn1[static_cast<std::size_t>(i)], vn1[static_cast<std::size_t>(pvt)]);
      std::swap(vn2[static_cast<std::size_t>(i)], vn2[static_cast<std::size_t>(pvt)]);
    }
    auto h = house_gen({a.col_ptr(i) + i, static_cast<std::size_t>(m - i)});
    tau[static_cast<std::size_t>(i)] = h.tau;
    if (i + 1 < n)
      detail::apply_reflector(a, i, h.tau, a.sub(i, i + 1, m - i, n - i - 1), w);
    for (std::int64_t j = i + 1; j < n; ++j) {
      double& n1 = vn1[static_cast<std::size_t>(j)];
      double& n2 = vn2[static_cast<std::size_t>(j)];
      if (n1 == 0.0) continue;
      double ratio = std::abs(a(i, j)) / n1;
      double temp = std::max(0.0, 1.0 - ratio * ratio);
      const double rel = n1 / n2;
      if (temp * rel * rel <= tol3z) {
        n1 = (i + 1 < m) ? norm2({a.col_ptr(j) + i + 1, static_cast<std::size_t>(m - i - 1)}) : 0.0;
        n2 = n1;
      } else {
        n1 *= std::sqrt(temp);
      }
    }
  }
}

inline void qrcp_reference(MatrixView a, std::span<double> tau, PivotVector& jpvt) {
  if (jpvt.size() != a.cols()) jpvt = PivotVector(a.cols());
  qrcp_reference(a, tau, jpvt.span());
}

}  // namespace bqrrp
