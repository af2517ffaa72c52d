#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "blas.hpp"
#include "matrix.hpp"

namespace bqrrp {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based draw: a pure function of (key, counter words, lane).
inline constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t c0,
                                            std::uint64_t c1,
                                            std::uint64_t lane) {
  std::uint64_t h = splitmix64(key ^ 0x6A09E667F3BCC909ULL);
  h = splitmix64(h ^ c0);
  h = splitmix64(h ^ (c1 + 0x3C6EF372FE94F82BULL));
  return splitmix64(h ^ (lane * 0xA54FF53A5F1D36F1ULL));
}

// Uniform in (0, 1], 53 random bits.
inline double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

/// Standard normal value attached to coordinate (row, col) of the stream
/// named by seed. Independent of any matrix shape or traversal order.
inline double gaussian_entry(std::uint64_t seed, std::int64_t row,
                             std::int64_t col) {
  const auto r = static_cast<std::uint64_t>(row);
  const auto c = static_cast<std::uint64_t>(col);
  const double u1 = detail::open_unit(detail::counter_hash(seed, r, c, 0));
  const double u2 = detail::open_unit(detail::counter_hash(seed, r, c, 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Dense d-by-m Gaussian operator, entries i.i.d. N(0, 1).
///
/// Only the triple (seed, d, m) is stored; entries are regenerated on demand,
/// and entry (i, j) does not depend on d or m. Consequently an operator with
/// more rows extends a smaller one with the same seed.
struct GaussianSketchOp {
  std::int64_t d = 0;
  std::int64_t m = 0;
  std::uint64_t seed = 0;

  double entry(std::int64_t i, std::int64_t j) const {
    return gaussian_entry(seed, i, j);
  }

  DenseMatrix materialize() const {
    DenseMatrix s(d, m);
    for (std::int64_t j = 0; j < m; ++j)
      for (std::int64_t i = 0; i < d; ++i) s(i, j) = entry(i, j);
    return s;
  }
};

/// out <- S * M. The operator is materialized for the duration of the call.
inline void sketch_apply(const GaussianSketchOp& op, ConstMatrixView m,
                         MatrixView out) {
  if (op.m != m.rows()) throw DimensionError("sketch_apply: S.m != M.rows");
  if (out.rows() != op.d || out.cols() != m.cols())
    throw DimensionError("sketch_apply: output shape");
  const DenseMatrix s = op.materialize();
  gemm(1.0, s, Op::NoTrans, m, Op::NoTrans, 0.0, out);
}

inline DenseMatrix sketch_apply(const GaussianSketchOp& op, ConstMatrixView m) {
  DenseMatrix out(op.d, m.cols());
  sketch_apply(op, m, out.view());
  return out;
}

}  // namespace bqrrp
