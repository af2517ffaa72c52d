#pragma once

#include <algorithm>
#include <cstdint>
#include <span>

#include "blas.hpp"
#include "factor.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "pivot_vector.hpp"
#include "pivoting.hpp"

namespace bqrrp {

enum class WideVariant { LuQr, Reference };

/// Buffers for column-pivoted QR of a d-by-w sketch, sized once for the
/// widest call (w = n) and reused as the sketch shrinks.
struct WideQrcpWorkspace {
  WideQrcpWorkspace(std::int64_t d, std::int64_t n, WideVariant variant)
      : d_(d), n_(n) {
    if (variant == WideVariant::LuQr) {
      transpose_.resize(static_cast<std::size_t>(n * d));
      lu_pivots_.resize(static_cast<std::size_t>(std::min(n, d)));
      perm_copy_.resize(static_cast<std::size_t>(n));
    }
    tau_.resize(static_cast<std::size_t>(std::min(n, d)));
  }

  std::span<double> tau(std::int64_t len) {
    return {tau_.data(), static_cast<std::size_t>(len)};
  }

  std::int64_t d_;
  std::int64_t n_;
  Workspace transpose_;
  IndexBuffer lu_pivots_;
  IndexBuffer perm_copy_;
  Workspace tau_;
};

/// LU-based wide QRCP: pivots from partially pivoted LU of the transposed
/// sketch, then unpivoted QR of the permuted sketch.
///
/// On return msk holds R_sk on and above the diagonal (reflectors below,
/// unused by callers) and j_qr the gather-form pivots (length msk.cols()).
inline void qrcp_wide_luqr(MatrixView msk, std::span<std::int64_t> j_qr,
                           WideQrcpWorkspace& ws) {
  const std::int64_t d = msk.rows();
  const std::int64_t w = msk.cols();
  if (static_cast<std::int64_t>(j_qr.size()) != w)
    throw DimensionError("qrcp_wide_luqr: pivot length != sketch width");
  if (w > ws.n_ || d > ws.d_ || ws.transpose_.empty())
    throw DimensionError("qrcp_wide_luqr: workspace too small");
  const std::int64_t k = std::min(d, w);
  MatrixView trans(ws.transpose_.data(), w, d, std::max<std::int64_t>(w, 1));
  transpose_into(msk, trans);
  std::span<std::int64_t> j_lu(ws.lu_pivots_.data(), static_cast<std::size_t>(k));
  lu_partial_pivot(trans, j_lu);
  piv_lu_to_qr(j_lu, j_qr);
  detail::col_perm_sequential(msk, j_qr, {ws.perm_copy_.data(), static_cast<std::size_t>(w)});
  qr_unpivoted(msk, ws.tau(k));
}

/// GEQP3-style wide QRCP with the same in/out contract as qrcp_wide_luqr.
inline void qrcp_wide_ref(MatrixView msk, std::span<std::int64_t> j_qr,
                          WideQrcpWorkspace& ws) {
  qrcp_reference(msk, ws.tau(std::min(msk.rows(), msk.cols())), j_qr);
}

inline void qrcp_wide(WideVariant variant, MatrixView msk,
                      std::span<std::int64_t> j_qr, WideQrcpWorkspace& ws) {
  if (variant == WideVariant::LuQr)
    qrcp_wide_luqr(msk, j_qr, ws);
  else
    qrcp_wide_ref(msk, j_qr, ws);
}

/// Allocating convenience form; returns the pivots.
inline PivotVector qrcp_wide(WideVariant variant, MatrixView msk) {
  WideQrcpWorkspace ws(msk.rows(), msk.cols(), variant);
  PivotVector j(msk.cols());
  qrcp_wide(variant, msk, j.span(), ws);
  return j;
}

}  // namespace bqrrp
