#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "blas.hpp"
#include "errors.hpp"
#include "matrix.hpp"

namespace bqrrp {

/// Internal panel width of the blocked Householder kernels. Affects speed only.
inline constexpr std::int64_t kDefaultPanel = 32;

struct HouseholderResult {
  double tau = 0.0;
  double beta = 0.0;
};

/// Generates H = I - tau v v^T with H x = beta e_1, in place.
///
/// On return x[0] holds beta and x[1:] holds v[1:] (v[0] = 1 is implicit).
/// beta = -sign(x[0]) ||x|| with sign(0) = +1. When x[1:] = 0 and x[0] >= 0
/// the reflector is the identity: tau = 0 and beta = x[0].
inline HouseholderResult house_gen(std::span<double> x) {
  if (x.empty()) return {};
  const double alpha = x[0];
  const double tail = norm2(x.subspan(1));
  if (tail == 0.0 && alpha >= 0.0) return {0.0, alpha};
  const double norm = std::hypot(alpha, tail);
  const double beta = alpha >= 0.0 ? -norm : norm;
  const double tau = (beta - alpha) / beta;
  const double scale = 1.0 / (alpha - beta);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] *= scale;
  x[0] = beta;
  return {tau, beta};
}

/// k Householder reflectors: column i of v holds v_i below the diagonal
/// (v_i(i) = 1 implicitly, entries above are ignored), tau[i] its scalar.
/// Q = H_0 H_1 ... H_{k-1}.
struct ReflectorBlock {
  ConstMatrixView v;
  std::span<const double> tau;

  std::int64_t rows() const noexcept { return v.rows(); }
  std::int64_t count() const noexcept { return static_cast<std::int64_t>(tau.size()); }
};

namespace detail {

// C <- (I - tau v v^T) C for a reflector stored in column `col` of V starting
// at row `col` (unit head). `w` needs C.cols() entries.
inline void apply_reflector(ConstMatrixView v, std::int64_t col, double tau,
                            MatrixView c, std::span<double> w) {
  if (tau == 0.0) return;
  const std::int64_t m = c.rows();
  const double* vp = v.col_ptr(col) + col;  // vp[0] is the implicit 1
  for (std::int64_t j = 0; j < c.cols(); ++j) {
    const double* cj = c.col_ptr(j);
    double s = cj[0];
    for (std::int64_t i = 1; i < m; ++i) s += vp[i] * cj[i];
    w[static_cast<std::size_t>(j)] = s;
  }
  for (std::int64_t j = 0; j < c.cols(); ++j) {
    double* cj = c.col_ptr(j);
    const double f = tau * w[static_cast<std::size_t>(j)];
    if (f == 0.0) continue;
    cj[0] -= f;
    for (std::int64_t i = 1; i < m; ++i) cj[i] -= f * vp[i];
  }
}

// Upper-triangular T with H_0...H_{k-1} = I - V T V^T (forward, columnwise).
// V is the m-by-k block whose unit diagonal is implicit.
inline void form_t(ConstMatrixView v, std::span<const double> tau, MatrixView t) {
  const std::int64_t k = static_cast<std::int64_t>(tau.size());
  const std::int64_t m = v.rows();
  fill(t, 0.0);
  for (std::int64_t i = 0; i < k; ++i) {
    const double ti = tau[static_cast<std::size_t>(i)];
    t(i, i) = ti;
    if (ti == 0.0 || i == 0) continue;
    // z(p) = v_p^T v_i for p < i.
    for (std::int64_t p = 0; p < i; ++p) {
      double s = v(i, p);
      const double* vp = v.col_ptr(p);
      const double* vi = v.col_ptr(i);
      for (std::int64_t r = i + 1; r < m; ++r) s += vp[r] * vi[r];
      t(p, i) = -ti * s;
    }
    // t(0:i, i) <- T(0:i, 0:i) * t(0:i, i), T upper triangular.
    for (std::int64_t p = 0; p < i; ++p) {
      double s = 0.0;
      for (std::int64_t q = p; q < i; ++q) s += t(p, q) * t(q, i);
      t(p, i) = s;
    }
  }
}

// C <- (I - V T V^T) C (trans = false) or (I - V T^T V^T) C (trans = true).
// V is m-by-k unit lower trapezoidal, C is m-by-n.
inline void apply_block(ConstMatrixView v, ConstMatrixView t, bool trans,
                        MatrixView c) {
  const std::int64_t m = v.rows();
  const std::int64_t k = v.cols();
  const std::int64_t n = c.cols();
  if (k == 0 || n == 0) return;
  constexpr std::int64_t col_chunk = 512;
  Workspace wbuf(static_cast<std::size_t>(k * std::min(n, col_chunk)));
  for (std::int64_t j0 = 0; j0 < n; j0 += col_chunk) {
    const std::int64_t nc = std::min(col_chunk, n - j0);
    MatrixView cc = c.sub(0, j0, m, nc);
    MatrixView w(wbuf.data(), k, nc, k);
    // W = V1^T C1 + V2^T C2, V1 unit lower triangular.
    for (std::int64_t j = 0; j < nc; ++j) {
      for (std::int64_t p = 0; p < k; ++p) {
        double s = cc(p, j);
        for (std::int64_t r = p + 1; r < k; ++r) s += v(r, p) * cc(r, j);
        w(p, j) = s;
      }
    }
    if (m > k)
      gemm(1.0, v.sub(k, 0, m - k, k), Op::Trans, cc.sub(k, 0, m - k, nc),
           Op::NoTrans, 1.0, w);
    // W <- T^T W or T W, in place, T upper triangular.
    for (std::int64_t j = 0; j < nc; ++j) {
      double* wj = w.col_ptr(j);
      if (trans) {
        for (std::int64_t p = k - 1; p >= 0; --p) {
          double s = 0.0;
          for (std::int64_t q = 0; q <= p; ++q) s += t(q, p) * wj[q];
          wj[p] = s;
        }
      } else {
        for (std::int64_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::int64_t q = p; q < k; ++q) s += t(p, q) * wj[q];
          wj[p] = s;
        }
      }
    }
    // C2 -= V2 W; C1 -= V1 W.
    if (m > k)
      gemm(-1.0, v.sub(k, 0, m - k, k), Op::NoTrans, w, Op::NoTrans, 1.0,
           cc.sub(k, 0, m - k, nc));
    for (std::int64_t j = 0; j < nc; ++j) {
      for (std::int64_t r = 0; r < k; ++r) {
        double s = w(r, j);
        for (std::int64_t p = 0; p < r; ++p) s += v(r, p) * w(p, j);
        cc(r, j) -= s;
      }
    }
  }
}

// Unblocked Householder QR of a panel, reflectors written below the diagonal.
inline void qr_unblocked(MatrixView a, std::span<double> tau, std::span<double> w) {
  const std::int64_t m = a.rows();
  const std::int64_t n = a.cols();
  const std::int64_t k = std::min(m, n);
  for (std::int64_t j = 0; j < k; ++j) {
    auto h = house_gen({a.col_ptr(j) + j, static_cast<std::size_t>(m - j)});
    tau[static_cast<std::size_t>(j)] = h.tau;
    if (j + 1 < n)
      apply_reflector(a, j, h.tau, a.sub(j, j + 1, m - j, n - j - 1), w);
  }
}

}  // namespace detail

/// Householder QR without pivoting, in place (GEQRF layout): R on and above
/// the diagonal, min(m, n) reflectors below it, their scalars in tau.
///
/// The trailing matrix is updated with compact-WY blocks of width `panel`.
inline void qr_unpivoted(MatrixView a, std::span<double> tau,
                         std::int64_t panel = kDefaultPanel) {
  const std::int64_t m = a.rows();
  const std::int64_t n = a.cols();
  const std::int64_t k = std::min(m, n);
  if (static_cast<std::int64_t>(tau.size()) < k)
    throw DimensionError("qr_unpivoted: tau shorter than min(m, n)");
  if (panel < 1) throw UsageError("qr_unpivoted: panel width must be >= 1");
  const std::int64_t nb = std::min(panel, std::max<std::int64_t>(k, 1));
  Workspace w(static_cast<std::size_t>(std::max<std::int64_t>(nb, 1)));
  Workspace tbuf(static_cast<std::size_t>(nb * nb));
  for (std::int64_t j0 = 0; j0 < k; j0 += nb) {
    const std::int64_t jb = std::min(nb, k - j0);
    MatrixView pnl = a.sub(j0, j0, m - j0, jb);
    detail::qr_unblocked(pnl, tau.subspan(static_cast<std::size_t>(j0), static_cast<std::size_t>(jb)), w);
    if (j0 + jb < n) {
      MatrixView t(tbuf.data(), jb, jb, jb);
      detail::form_t(pnl, tau.subspan(static_cast<std::size_t>(j0), static_cast<std::size_t>(jb)), t);
      detail::apply_block(pnl, t, true, a.sub(j0, j0 + jb, m - j0, n - j0 - jb));
    }
  }
}

namespace detail {

inline void apply_reflectors(const ReflectorBlock& q, MatrixView c, bool trans,
                             std::int64_t panel) {
  const std::int64_t m = q.rows();
  const std::int64_t k = q.count();
  if (c.rows() != m) throw DimensionError("apply_q: Q rows != C rows");
  if (q.v.cols() < k || k > m) throw DimensionError("apply_q: reflector storage too small");
  if (k == 0 || c.cols() == 0) return;
  const std::int64_t nb = std::min(panel, k);
  Workspace tbuf(static_cast<std::size_t>(nb * nb));
  const std::int64_t nblocks = (k + nb - 1) / nb;
  for (std::int64_t b = 0; b < nblocks; ++b) {
    // Q^T = H_{k-1}..H_0 applies block 0 first; Q applies the last first.
    const std::int64_t blk = trans ? b : nblocks - 1 - b;
    const std::int64_t j0 = blk * nb;
    const std::int64_t jb = std::min(nb, k - j0);
    ConstMatrixView v = q.v.sub(j0, j0, m - j0, jb);
    MatrixView t(tbuf.data(), jb, jb, jb);
    form_t(v, q.tau.subspan(static_cast<std::size_t>(j0), static_cast<std::size_t>(jb)), t);
    apply_block(v, t, trans, c.sub(j0, 0, m - j0, c.cols()));
  }
}

}  // namespace detail

/// C <- Q^T C = H_{k-1} ... H_0 C, applied in compact-WY blocks.
inline void apply_qt(const ReflectorBlock& q, MatrixView c,
                     std::int64_t panel = kDefaultPanel) {
  detail::apply_reflectors(q, c, true, panel);
}

/// C <- Q C = H_0 ... H_{k-1} C.
inline void apply_q(const ReflectorBlock& q, MatrixView c,
                    std::int64_t panel = kDefaultPanel) {
  detail::apply_reflectors(q, c, false, panel);
}

/// First ncols columns of Q as an explicit m-by-ncols matrix.
inline DenseMatrix form_q(const ReflectorBlock& q, std::int64_t ncols) {
  if (ncols > q.rows() || ncols < 0) throw DimensionError("form_q: ncols > m");
  DenseMatrix out(q.rows(), ncols);
  for (std::int64_t i = 0; i < ncols; ++i) out(i, i) = 1.0;
  apply_q(q, out.view());
  return out;
}

/// LAPACK operation count of GEQRF (LAWN 41); arguments mirrored when m < n.
inline double geqrf_flops(std::int64_t m, std::int64_t n) {
  if (m < n) std::swap(m, n);
  const double dm = static_cast<double>(m);
  const double dn = static_cast<double>(n);
  return 2.0 * dm * dn * dn - (2.0 / 3.0) * dn * dn * dn + dm * dn + dn * dn +
         (14.0 / 3.0) * dn;
}

/// Operation count of applying k reflectors of length m to an m-by-n matrix
/// (ORMQR, LAWN 41): 4nmk - 2nk^2 + 3nk.
inline double ormqr_flops(std::int64_t n, std::int64_t m, std::int64_t k) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double dk = static_cast<double>(k);
  return 4.0 * dn * dm * dk - 2.0 * dn * dk * dk + 3.0 * dn * dk;
}

}  // namespace bqrrp
