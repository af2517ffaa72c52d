#pragma once

#include <algorithm>
#include <cstdint>

#include "errors.hpp"
#include "matrix.hpp"
#include "parallel.hpp"

/// Reference Level-3 kernels over column-major views.
///
/// No external BLAS is used. Every output element is accumulated in a fixed
/// order, so results are bitwise reproducible regardless of threading.
namespace bqrrp {

enum class Op { NoTrans, Trans };
enum class Side { Left, Right };
enum class Uplo { Upper, Lower };
enum class Diag { NonUnit, Unit };

namespace detail {

inline std::int64_t op_rows(ConstMatrixView a, Op op) {
  return op == Op::NoTrans ? a.rows() : a.cols();
}
inline std::int64_t op_cols(ConstMatrixView a, Op op) {
  return op == Op::NoTrans ? a.cols() : a.rows();
}

// C(:, j0:j1) += alpha * A * op(B)(:, j0:j1), A not transposed.
inline void gemm_n_kernel(double alpha, ConstMatrixView a, ConstMatrixView b,
                          Op op_b, MatrixView c, std::int64_t j0,
                          std::int64_t j1) {
  constexpr std::int64_t row_block = 512;
  const std::int64_t m = c.rows();
  const std::int64_t k = a.cols();
  auto bval = [&](std::int64_t p, std::int64_t j) {
    return op_b == Op::NoTrans ? b(p, j) : b(j, p);
  };
  std::int64_t j = j0;
  for (; j + 4 <= j1; j += 4) {
    double* c0 = c.col_ptr(j);
    double* c1 = c.col_ptr(j + 1);
    double* c2 = c.col_ptr(j + 2);
    double* c3 = c.col_ptr(j + 3);
    for (std::int64_t i0 = 0; i0 < m; i0 += row_block) {
      const std::int64_t i1 = std::min(m, i0 + row_block);
      for (std::int64_t p = 0; p < k; ++p) {
        const double b0 = alpha * bval(p, j);
        const double b1 = alpha * bval(p, j + 1);
        const double b2 = alpha * bval(p, j + 2);
        const double b3 = alpha * bval(p, j + 3);
        const double* ap = a.col_ptr(p);
        for (std::int64_t i = i0; i < i1; ++i) {
          const double x = ap[i];
          c0[i] += x * b0;
          c1[i] += x * b1;
          c2[i] += x * b2;
          c3[i] += x * b3;
        }
      }
    }
  }
  for (; j < j1; ++j) {
    double* cj = c.col_ptr(j);
    for (std::int64_t p = 0; p < k; ++p) {
      const double bj = alpha * bval(p, j);
      const double* ap = a.col_ptr(p);
      for (std::int64_t i = 0; i < m; ++i) cj[i] += ap[i] * bj;
    }
  }
}

// C(:, j0:j1) += alpha * A^T * B(:, j0:j1) via 4x4 blocks of dot products.
inline void gemm_tn_kernel(double alpha, ConstMatrixView a, ConstMatrixView b,
                           MatrixView c, std::int64_t j0, std::int64_t j1) {
  const std::int64_t m = c.rows();
  const std::int64_t k = a.rows();
  std::int64_t j = j0;
  for (; j < j1; j += 4) {
    const std::int64_t nj = std::min<std::int64_t>(4, j1 - j);
    std::int64_t i = 0;
    for (; i < m; i += 4) {
      const std::int64_t ni = std::min<std::int64_t>(4, m - i);
      double acc[4][4] = {};
      if (ni == 4 && nj == 4) {
        const double* a0 = a.col_ptr(i);
        const double* a1 = a.col_ptr(i + 1);
        const double* a2 = a.col_ptr(i + 2);
        const double* a3 = a.col_ptr(i + 3);
        const double* b0 = b.col_ptr(j);
        const double* b1 = b.col_ptr(j + 1);
        const double* b2 = b.col_ptr(j + 2);
        const double* b3 = b.col_ptr(j + 3);
        for (std::int64_t p = 0; p < k; ++p) {
          const double x0 = a0[p], x1 = a1[p], x2 = a2[p], x3 = a3[p];
          const double y0 = b0[p], y1 = b1[p], y2 = b2[p], y3 = b3[p];
          acc[0][0] += x0 * y0; acc[0][1] += x0 * y1; acc[0][2] += x0 * y2; acc[0][3] += x0 * y3;
          acc[1][0] += x1 * y0; acc[1][1] += x1 * y1; acc[1][2] += x1 * y2; acc[1][3] += x1 * y3;
          acc[2][0] += x2 * y0; acc[2][1] += x2 * y1; acc[2][2] += x2 * y2; acc[2][3] += x2 * y3;
          acc[3][0] += x3 * y0; acc[3][1] += x3 * y1; acc[3][2] += x3 * y2; acc[3][3] += x3 * y3;
        }
      } else {
        for (std::int64_t ii = 0; ii < ni; ++ii)
          for (std::int64_t jj = 0; jj < nj; ++jj) {
            const double* ap = a.col_ptr(i + ii);
            const double* bp = b.col_ptr(j + jj);
            double s = 0.0;
            for (std::int64_t p = 0; p < k; ++p) s += ap[p] * bp[p];
            acc[ii][jj] = s;
          }
      }
      for (std::int64_t ii = 0; ii < ni; ++ii)
        for (std::int64_t jj = 0; jj < nj; ++jj)
          c(i + ii, j + jj) += alpha * acc[ii][jj];
    }
  }
}

}  // namespace detail

/// C <- alpha * op(A) * op(B) + beta * C.
///
/// With beta == 0, C is overwritten without being read. C must not overlap A
/// or B.
inline void gemm(double alpha, ConstMatrixView a, Op op_a, ConstMatrixView b,
                 Op op_b, double beta, MatrixView c) {
  const std::int64_t m = detail::op_rows(a, op_a);
  const std::int64_t k = detail::op_cols(a, op_a);
  const std::int64_t n = detail::op_cols(b, op_b);
  if (detail::op_rows(b, op_b) != k || c.rows() != m || c.cols() != n)
    throw DimensionError("gemm: shape mismatch");

  if (beta == 0.0) {
    fill(c, 0.0);
  } else if (beta != 1.0) {
    for (std::int64_t j = 0; j < n; ++j)
      for (std::int64_t i = 0; i < m; ++i) c(i, j) *= beta;
  }
  if (alpha == 0.0 || k == 0 || m == 0 || n == 0) return;

  const std::int64_t work = m * k;
  const std::int64_t min_cols = std::max<std::int64_t>(4, (1 << 16) / std::max<std::int64_t>(1, work)) ;
  std::int64_t blocks = (n + 3) / 4;
  parallel_for(blocks, (min_cols + 3) / 4, [&](std::int64_t b0, std::int64_t b1) {
    const std::int64_t j0 = b0 * 4;
    const std::int64_t j1 = std::min(n, b1 * 4);
    if (op_a == Op::NoTrans) {
      detail::gemm_n_kernel(alpha, a, b, op_b, c, j0, j1);
    } else if (op_b == Op::NoTrans) {
      detail::gemm_tn_kernel(alpha, a, b, c, j0, j1);
    } else {
      for (std::int64_t j = j0; j < j1; ++j)
        for (std::int64_t i = 0; i < m; ++i) {
          double s = 0.0;
          for (std::int64_t p = 0; p < k; ++p) s += a(p, i) * b(j, p);
          c(i, j) += alpha * s;
        }
    }
  });
}

/// Solves op(A) X = B (left) or X op(A) = B (right) for triangular A;
/// B is overwritten with X.
inline void trsm(Side side, Uplo uplo, Op op, Diag diag, ConstMatrixView a,
                 MatrixView b) {
  const std::int64_t n = a.rows();
  if (a.cols() != n) throw DimensionError("trsm: triangular factor not square");
  if ((side == Side::Left ? b.rows() : b.cols()) != n)
    throw DimensionError("trsm: shape mismatch");
  const bool unit = diag == Diag::Unit;
  if (!unit) {
    for (std::int64_t i = 0; i < n; ++i)
      if (a(i, i) == 0.0) throw SingularError("trsm", i);
  }
  // Effective triangle after transposition: upper iff (Upper, NoTrans) or
  // (Lower, Trans).
  auto at = [&](std::int64_t i, std::int64_t j) {
    return op == Op::NoTrans ? a(i, j) : a(j, i);
  };
  const bool eff_upper = (uplo == Uplo::Upper) == (op == Op::NoTrans);

  if (side == Side::Left) {
    const std::int64_t nrhs = b.cols();
    for (std::int64_t c = 0; c < nrhs; ++c) {
      double* x = b.col_ptr(c);
      if (eff_upper) {
        for (std::int64_t i = n - 1; i >= 0; --i) {
          double s = x[i];
          for (std::int64_t p = i + 1; p < n; ++p) s -= at(i, p) * x[p];
          x[i] = unit ? s : s / at(i, i);
        }
      } else {
        for (std::int64_t i = 0; i < n; ++i) {
          double s = x[i];
          for (std::int64_t p = 0; p < i; ++p) s -= at(i, p) * x[p];
          x[i] = unit ? s : s / at(i, i);
        }
      }
    }
    return;
  }

  // Right side: column j of X depends on the columns solved before it.
  const std::int64_t m = b.rows();
  auto solve_col = [&](std::int64_t j, std::int64_t p0, std::int64_t p1) {
    double* xj = b.col_ptr(j);
    for (std::int64_t p = p0; p < p1; ++p) {
      const double f = at(p, j);
      if (f == 0.0) continue;
      const double* xp = b.col_ptr(p);
      for (std::int64_t i = 0; i < m; ++i) xj[i] -= f * xp[i];
    }
    if (!unit) {
      const double inv = at(j, j);
      for (std::int64_t i = 0; i < m; ++i) xj[i] /= inv;
    }
  };
  if (eff_upper) {
    for (std::int64_t j = 0; j < n; ++j) solve_col(j, 0, j);
  } else {
    for (std::int64_t j = n - 1; j >= 0; --j) solve_col(j, j + 1, n);
  }
}

/// G <- A^T A. Only the upper triangle is computed; the lower one is a
/// mirror, so G is exactly symmetric.
inline void syrk(ConstMatrixView a, MatrixView g) {
  const std::int64_t k = a.cols();
  if (g.rows() != k || g.cols() != k) throw DimensionError("syrk: shape mismatch");
  const std::int64_t m = a.rows();
  for (std::int64_t j = 0; j < k; ++j) {
    const double* aj = a.col_ptr(j);
    for (std::int64_t i = 0; i <= j; ++i) {
      const double* ai = a.col_ptr(i);
      double s = 0.0;
      for (std::int64_t p = 0; p < m; ++p) s += ai[p] * aj[p];
      g(i, j) = s;
      g(j, i) = s;
    }
  }
}

inline DenseMatrix syrk(ConstMatrixView a) {
  DenseMatrix g(a.cols(), a.cols());
  syrk(a, g.view());
  return g;
}

/// dst <- src^T into a separate buffer.
inline void transpose_into(ConstMatrixView src, MatrixView dst) {
  if (dst.rows() != src.cols() || dst.cols() != src.rows())
    throw DimensionError("transpose: shape mismatch");
  constexpr std::int64_t tile = 32;
  for (std::int64_t j0 = 0; j0 < src.cols(); j0 += tile)
    for (std::int64_t i0 = 0; i0 < src.rows(); i0 += tile) {
      const std::int64_t j1 = std::min(src.cols(), j0 + tile);
      const std::int64_t i1 = std::min(src.rows(), i0 + tile);
      for (std::int64_t j = j0; j < j1; ++j)
        for (std::int64_t i = i0; i < i1; ++i) dst(j, i) = src(i, j);
    }
}

inline DenseMatrix transpose_copy(ConstMatrixView src) {
  DenseMatrix out(src.cols(), src.rows());
  transpose_into(src, out.view());
  return out;
}

}  // namespace bqrrp
