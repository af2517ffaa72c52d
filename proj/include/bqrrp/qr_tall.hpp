#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "blas.hpp"
#include "errors.hpp"
#include "factor.hpp"
#include "householder.hpp"
#include "matrix.hpp"

namespace bqrrp {

enum class PanelVariant { Householder, CholQr };

/// M_pre <- panel(:, 0:k) * R_sk11^{-1}, in place on the first k columns.
inline void precondition(MatrixView panel_k, ConstMatrixView r_sk11) {
  if (panel_k.cols() != r_sk11.rows())
    throw DimensionError("precondition: panel width != k");
  trsm(Side::Right, Uplo::Upper, Op::NoTrans, Diag::NonUnit, r_sk11, panel_k);
}

/// Cholesky QR in place: Q_chol overwrites M_pre, R_chol is written to the
/// upper triangle of `r_chol` (k-by-k).
///
/// Throws CholeskyBreakdown on a non-positive pivot, and also when a pivot
/// R(j,j)^2 falls to k*u times ||M_pre(:, j)||^2: the column is then
/// dependent on its predecessors to working accuracy and Q_chol would be
/// meaningless.
inline void cholqr(MatrixView m_pre, MatrixView r_chol) {
  const std::int64_t k = m_pre.cols();
  if (r_chol.rows() != k || r_chol.cols() != k)
    throw DimensionError("cholqr: R buffer must be k-by-k");
  syrk(m_pre, r_chol);
  if (auto fail = cholesky(r_chol)) throw CholeskyBreakdown(*fail);
  const double floor = static_cast<double>(k) * unit_roundoff;
  for (std::int64_t j = 0; j < k; ++j) {
    const double cn = norm2(m_pre.col(j));
    const double rel = r_chol(j, j) / cn;
    if (!(rel * rel > floor)) throw CholeskyBreakdown(j);
  }
  trsm(Side::Right, Uplo::Upper, Op::NoTrans, Diag::NonUnit, r_chol, m_pre);
}

/// Householder reconstruction of an explicit m-by-k Q with near-orthonormal
/// columns.
///
/// Computes the unpivoted LU factorization Q - diag(D) = L U with the signs
/// chosen on the fly as D(j) = -sign(pivot), so every |U(j, j)| >= 1. The unit
/// lower L is left below the diagonal of q as the Householder vectors and
/// tau(j) = -U(j, j) D(j). Afterwards H_0 ... H_{k-1} e_j = D(j) Q(:, j).
/// The upper triangle of q is scratch on return.
inline void householder_reconstruct(MatrixView q, std::span<double> tau,
                                    std::span<double> signs) {
  const std::int64_t m = q.rows();
  const std::int64_t k = q.cols();
  if (k > m) throw DimensionError("householder_reconstruct: more columns than rows");
  if (static_cast<std::int64_t>(tau.size()) < k || static_cast<std::int64_t>(signs.size()) < k)
    throw DimensionError("householder_reconstruct: tau/sign buffers too short");
  for (std::int64_t j = 0; j < k; ++j) {
    const double pivot = q(j, j);
    const double s = pivot >= 0.0 ? -1.0 : 1.0;
    const double ujj = pivot - s;
    signs[static_cast<std::size_t>(j)] = s;
    tau[static_cast<std::size_t>(j)] = -ujj * s;
    q(j, j) = ujj;
    double* cj = q.col_ptr(j);
    const double inv = 1.0 / ujj;
    for (std::int64_t i = j + 1; i < m; ++i) cj[i] *= inv;
    for (std::int64_t c = j + 1; c < k; ++c) {
      double* cc = q.col_ptr(c);
      const double f = cc[j];
      if (f == 0.0) continue;
      for (std::int64_t i = j + 1; i < m; ++i) cc[i] -= cj[i] * f;
    }
  }
}

/// dest <- diag(D) * R_chol * R_sk(0:k, 0:b), writing only on and above the
/// diagonal of dest (the strict lower part may hold reflectors).
inline void unprecondition(ConstMatrixView r_chol, std::span<const double> signs,
                           ConstMatrixView r_sk, MatrixView dest) {
  const std::int64_t k = r_chol.rows();
  const std::int64_t b = r_sk.cols();
  if (r_chol.cols() != k || r_sk.rows() < k || dest.rows() != k || dest.cols() != b ||
      static_cast<std::int64_t>(signs.size()) < k)
    throw DimensionError("unprecondition: shape mismatch");
  for (std::int64_t j = 0; j < b; ++j) {
    for (std::int64_t i = 0; i <= std::min(j, k - 1); ++i) {
      double s = 0.0;
      const std::int64_t pmax = std::min(j, k - 1);
      for (std::int64_t p = i; p <= pmax; ++p) s += r_chol(i, p) * r_sk(p, j);
      dest(i, j) = signs[static_cast<std::size_t>(i)] * s;
    }
  }
}

/// Plain Householder panel QR: all min(rows, cols) reflectors are computed.
inline void qr_tall_hqr(MatrixView panel, std::span<double> tau) {
  qr_unpivoted(panel, tau);
}

/// Scratch for the Cholesky QR panel path: a b-by-b R_chol / Gram buffer
/// and a length-b sign vector.
struct CholQrWorkspace {
  explicit CholQrWorkspace(std::int64_t b)
      : b(b), gram(static_cast<std::size_t>(b * b)), signs(static_cast<std::size_t>(b)) {}
  std::int64_t b;
  Workspace gram;
  Workspace signs;
};

/// Preconditioned Cholesky QR of a panel followed by Householder
/// reconstruction. Produces k reflectors in panel(:, 0:k) with scalars
/// tau[0:k] and R11 (k-by-cols) in the upper part of panel(0:k, :).
///
/// r_sk is the sketch's triangular factor, at least k-by-panel.cols().
/// Returns true if Cholesky broke down and the Householder path was used
/// instead (then min(rows, cols) reflectors are produced).
inline bool qr_tall_cqr(MatrixView panel, ConstMatrixView r_sk, std::int64_t k,
                        std::span<double> tau, CholQrWorkspace& ws) {
  const std::int64_t m = panel.rows();
  const std::int64_t bw = panel.cols();
  if (k < 0 || k > std::min(m, bw) || k > ws.b || r_sk.rows() < k || r_sk.cols() < bw)
    throw DimensionError("qr_tall_cqr: bad block rank or sketch factor");
  if (k == 0) {
    qr_tall_hqr(panel, tau);
    return true;
  }
  MatrixView pk = panel.sub(0, 0, m, k);
  ConstMatrixView rsk11 = r_sk.sub(0, 0, k, k);
  precondition(pk, rsk11);
  MatrixView r_chol(ws.gram.data(), k, k, k);
  try {
    cholqr(pk, r_chol);
  } catch (const CholeskyBreakdown&) {
    // Undo the preconditioning (pk <- pk * R_sk11) and fall back.
    for (std::int64_t j = k - 1; j >= 0; --j) {
      double* cj = pk.col_ptr(j);
      const double rjj = rsk11(j, j);
      for (std::int64_t i = 0; i < m; ++i) cj[i] *= rjj;
      for (std::int64_t p = 0; p < j; ++p) {
        const double f = rsk11(p, j);
        const double* cp = pk.col_ptr(p);
        for (std::int64_t i = 0; i < m; ++i) cj[i] += f * cp[i];
      }
    }
    qr_tall_hqr(panel, tau);
    return true;
  }
  std::span<double> signs(ws.signs.data(), static_cast<std::size_t>(k));
  householder_reconstruct(pk, tau, signs);
  unprecondition(r_chol, signs, r_sk.sub(0, 0, k, bw), panel.sub(0, 0, k, bw));
  return false;
}

}  // namespace bqrrp
