#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>

#include "errors.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "pivot_vector.hpp"

namespace bqrrp {

/// Converts an LU row-swap list (row i was interchanged with row
/// j_lu[i] - 1, applied in order) into a gather-form pivot vector of length
/// out.size(). out is overwritten.
inline void piv_lu_to_qr(std::span<const std::int64_t> j_lu,
                         std::span<std::int64_t> out) {
  const auto n = static_cast<std::int64_t>(out.size());
  if (static_cast<std::int64_t>(j_lu.size()) > n)
    throw FormatError("piv_lu_to_qr: swap list longer than n");
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i + 1;
  for (std::size_t i = 0; i < j_lu.size(); ++i) {
    const std::int64_t t = j_lu[i];
    if (t < 1 || t > n) throw FormatError("piv_lu_to_qr: swap target out of range");
    std::swap(out[i], out[static_cast<std::size_t>(t - 1)]);
  }
}

inline PivotVector piv_lu_to_qr(std::span<const std::int64_t> j_lu,
                                std::int64_t n) {
  PivotVector out(n);
  piv_lu_to_qr(j_lu, out.span());
  return out;
}

namespace detail {

// Swap-based in-place gather. `work` holds a private copy of the pivots and
// is destroyed; each step swaps the wanted column into place and redirects
// the one still-pending reference to the column that was displaced.
template <typename SwapFn>
void sequential_permute(std::span<std::int64_t> work, SwapFn&& swap_items) {
  const auto n = static_cast<std::int64_t>(work.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t j = work[static_cast<std::size_t>(i)] - 1;
    if (j == i) continue;
    swap_items(i, j);
    // Only positions after i can still refer to location i.
    auto it = std::find(work.begin() + i + 1, work.end(), i + 1);
    if (it != work.end()) *it = j + 1;
  }
}

inline void swap_columns(MatrixView m, std::int64_t a, std::int64_t b) {
  std::swap_ranges(m.col_ptr(a), m.col_ptr(a) + m.rows(), m.col_ptr(b));
}

// Unchecked variant used by the driver; `copy` must have J's length.
inline void col_perm_sequential(MatrixView m, std::span<const std::int64_t> j,
                                std::span<std::int64_t> copy) {
  std::copy(j.begin(), j.end(), copy.begin());
  sequential_permute(copy, [&](std::int64_t a, std::int64_t b) {
    swap_columns(m, a, b);
  });
}

inline void col_perm_gather(ConstMatrixView m, std::span<const std::int64_t> j,
                            MatrixView scratch) {
  parallel_for(m.cols(), 16, [&](std::int64_t c0, std::int64_t c1) {
    for (std::int64_t c = c0; c < c1; ++c) {
      const double* src = m.col_ptr(j[static_cast<std::size_t>(c)] - 1);
      std::copy_n(src, m.rows(), scratch.col_ptr(c));
    }
  });
}

}  // namespace detail

/// Permutes the columns of M in place so that new column j is old column
/// J[j] - 1. J itself is left untouched (a private copy is consumed).
inline void col_perm_sequential(MatrixView m, std::span<const std::int64_t> j) {
  if (static_cast<std::int64_t>(j.size()) != m.cols())
    throw DimensionError("col_perm_sequential: length mismatch");
  if (!is_permutation(j)) throw FormatError("col_perm_sequential: invalid permutation");
  IndexBuffer copy(j.size());
  detail::col_perm_sequential(m, j, copy);
}

/// scratch(:, i) <- M(:, J[i] - 1). Every column is independent.
inline void col_perm_gather(ConstMatrixView m, std::span<const std::int64_t> j,
                            MatrixView scratch) {
  if (static_cast<std::int64_t>(j.size()) != m.cols())
    throw DimensionError("col_perm_gather: length mismatch");
  if (scratch.rows() != m.rows() || scratch.cols() != m.cols())
    throw UsageError("col_perm_gather: scratch shape differs from M");
  if (overlaps(m, scratch)) throw UsageError("col_perm_gather: scratch aliases M");
  if (!is_permutation(j)) throw FormatError("col_perm_gather: invalid permutation");
  detail::col_perm_gather(m, j, scratch);
}

/// J_tail(j) <- old J_tail(J_local(j) - 1). J_local is consumed.
inline void vec_perm(std::span<std::int64_t> j_tail,
                     std::span<std::int64_t> j_local) {
  if (j_tail.size() != j_local.size())
    throw DimensionError("vec_perm: length mismatch");
  if (!is_permutation(j_local)) throw FormatError("vec_perm: invalid permutation");
  detail::sequential_permute(j_local, [&](std::int64_t a, std::int64_t b) {
    std::swap(j_tail[static_cast<std::size_t>(a)], j_tail[static_cast<std::size_t>(b)]);
  });
}

}  // namespace bqrrp
