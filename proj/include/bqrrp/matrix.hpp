#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>

#include "errors.hpp"
#include "memory.hpp"

namespace bqrrp {

/// Non-owning column-major window: element (i, j) lives at data[i + j * stride].
///
/// Views are cheap to copy and never allocate. Sub-views share the parent's
/// stride, which is what lets R and the Householder vectors live side by side
/// in the input matrix's buffer.
template <typename T>
class BasicMatrixView {
 public:
  using value_type = std::remove_const_t<T>;

  BasicMatrixView() = default;
  BasicMatrixView(T* data, std::int64_t rows, std::int64_t cols,
                  std::int64_t stride)
      : data_(data), rows_(rows), cols_(cols), stride_(stride) {
    assert(rows >= 0 && cols >= 0);
    assert(stride >= std::max<std::int64_t>(rows, 1));
  }

  // mutable -> const view
  template <typename U,
            typename = std::enable_if_t<std::is_same_v<const U, T> &&
                                        !std::is_same_v<U, T>>>
  BasicMatrixView(const BasicMatrixView<U>& other)
      : data_(other.data()),
        rows_(other.rows()),
        cols_(other.cols()),
        stride_(other.stride()) {}

  T* data() const noexcept { return data_; }
  std::int64_t rows() const noexcept { return rows_; }
  std::int64_t cols() const noexcept { return cols_; }
  std::int64_t stride() const noexcept { return stride_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::int64_t i, std::int64_t j) const noexcept {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[i + j * stride_];
  }

  T* col_ptr(std::int64_t j) const noexcept { return data_ + j * stride_; }

  std::span<T> col(std::int64_t j) const noexcept {
    return {col_ptr(j), static_cast<std::size_t>(rows_)};
  }

  BasicMatrixView sub(std::int64_t r0, std::int64_t c0, std::int64_t nr,
                      std::int64_t nc) const {
    if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows_ ||
        c0 + nc > cols_) {
      throw DimensionError("submatrix window out of range");
    }
    T* origin = (nr == 0 || nc == 0) ? data_ : data_ + r0 + c0 * stride_;
    return {origin, nr, nc, stride_};
  }

  BasicMatrixView cols_from(std::int64_t c0) const {
    return sub(0, c0, rows_, cols_ - c0);
  }
  BasicMatrixView rows_from(std::int64_t r0) const {
    return sub(r0, 0, rows_ - r0, cols_);
  }

 private:
  T* data_ = nullptr;
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::int64_t stride_ = 1;
};

using MatrixView = BasicMatrixView<double>;
using ConstMatrixView = BasicMatrixView<const double>;

/// Owning column-major matrix of doubles with stride == rows.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::int64_t rows, std::int64_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw DimensionError("negative matrix size");
    buf_.assign(static_cast<std::size_t>(rows * cols), fill);
  }

  /// Row-wise literal, convenient in tests: {{1, 2}, {3, 4}}.
  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows) {
    const auto m = static_cast<std::int64_t>(rows.size());
    const auto n = m == 0 ? 0 : static_cast<std::int64_t>(rows.begin()->size());
    DenseMatrix a(m, n);
    std::int64_t i = 0;
    for (const auto& row : rows) {
      if (static_cast<std::int64_t>(row.size()) != n)
        throw DimensionError("ragged row literal");
      std::int64_t j = 0;
      for (double x : row) a(i, j++) = x;
      ++i;
    }
    return a;
  }

  static DenseMatrix identity(std::int64_t n) {
    DenseMatrix a(n, n);
    for (std::int64_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
  }

  static DenseMatrix copy_of(ConstMatrixView src) {
    DenseMatrix a(src.rows(), src.cols());
    for (std::int64_t j = 0; j < src.cols(); ++j)
      std::copy_n(src.col_ptr(j), src.rows(), a.col_ptr(j));
    return a;
  }

  std::int64_t rows() const noexcept { return rows_; }
  std::int64_t cols() const noexcept { return cols_; }
  std::int64_t stride() const noexcept { return std::max<std::int64_t>(rows_, 1); }
  double* data() noexcept { return buf_.data(); }
  const double* data() const noexcept { return buf_.data(); }
  std::span<double> values() noexcept { return buf_; }
  std::span<const double> values() const noexcept { return buf_; }

  double& operator()(std::int64_t i, std::int64_t j) noexcept {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return buf_[static_cast<std::size_t>(i + j * stride())];
  }
  double operator()(std::int64_t i, std::int64_t j) const noexcept {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return buf_[static_cast<std::size_t>(i + j * stride())];
  }

  double* col_ptr(std::int64_t j) noexcept { return data() + j * stride(); }
  const double* col_ptr(std::int64_t j) const noexcept {
    return data() + j * stride();
  }

  MatrixView view() noexcept { return {data(), rows_, cols_, stride()}; }
  ConstMatrixView view() const noexcept {
    return {data(), rows_, cols_, stride()};
  }
  operator MatrixView() noexcept { return view(); }
  operator ConstMatrixView() const noexcept { return view(); }

  MatrixView sub(std::int64_t r0, std::int64_t c0, std::int64_t nr,
                 std::int64_t nc) {
    return view().sub(r0, c0, nr, nc);
  }
  ConstMatrixView sub(std::int64_t r0, std::int64_t c0, std::int64_t nr,
                      std::int64_t nc) const {
    return view().sub(r0, c0, nr, nc);
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.buf_ == b.buf_;
  }

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  Workspace buf_;
};

// ---------------------------------------------------------------------------
// Small whole-matrix helpers.

inline void copy_into(ConstMatrixView src, MatrixView dst) {
  if (src.rows() != dst.rows() || src.cols() != dst.cols())
    throw DimensionError("copy_into: shape mismatch");
  for (std::int64_t j = 0; j < src.cols(); ++j)
    std::copy_n(src.col_ptr(j), src.rows(), dst.col_ptr(j));
}

inline void fill(MatrixView a, double value) {
  for (std::int64_t j = 0; j < a.cols(); ++j)
    std::fill_n(a.col_ptr(j), a.rows(), value);
}

/// Zeroes every entry strictly below the main diagonal.
inline void zero_strict_lower(MatrixView a) {
  for (std::int64_t j = 0; j < a.cols(); ++j)
    for (std::int64_t i = j + 1; i < a.rows(); ++i) a(i, j) = 0.0;
}

/// Copy of the upper trapezoid (zeros below the diagonal).
inline DenseMatrix upper_trapezoid(ConstMatrixView a) {
  DenseMatrix r(a.rows(), a.cols());
  for (std::int64_t j = 0; j < a.cols(); ++j)
    for (std::int64_t i = 0; i <= std::min(j, a.rows() - 1); ++i)
      r(i, j) = a(i, j);
  return r;
}

/// Frobenius norm with scaling, immune to overflow of the squares.
inline double frobenius_norm(ConstMatrixView a) {
  double scale = 0.0;
  double ssq = 1.0;
  for (std::int64_t j = 0; j < a.cols(); ++j) {
    for (std::int64_t i = 0; i < a.rows(); ++i) {
      const double x = std::abs(a(i, j));
      if (x == 0.0) continue;
      if (scale < x) {
        ssq = 1.0 + ssq * (scale / x) * (scale / x);
        scale = x;
      } else {
        ssq += (x / scale) * (x / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

inline double max_abs(ConstMatrixView a) {
  double m = 0.0;
  for (std::int64_t j = 0; j < a.cols(); ++j)
    for (std::int64_t i = 0; i < a.rows(); ++i)
      m = std::max(m, std::abs(a(i, j)));
  return m;
}

/// Euclidean norm of a strided-free vector, scaled like frobenius_norm.
inline double norm2(std::span<const double> x) {
  return frobenius_norm(
      ConstMatrixView(x.data(), static_cast<std::int64_t>(x.size()), 1,
                      std::max<std::int64_t>(1, static_cast<std::int64_t>(x.size()))));
}

/// Unit roundoff for binary64 (2^-53).
inline constexpr double unit_roundoff = 1.1102230246251565e-16;

/// True when the two views' memory ranges intersect.
template <typename A, typename B>
bool overlaps(const BasicMatrixView<A>& a, const BasicMatrixView<B>& b) {
  if (a.empty() || b.empty()) return false;
  const auto* a0 = reinterpret_cast<const char*>(a.data());
  const auto* a1 = reinterpret_cast<const char*>(
      a.data() + (a.cols() - 1) * a.stride() + a.rows());
  const auto* b0 = reinterpret_cast<const char*>(b.data());
  const auto* b1 = reinterpret_cast<const char*>(
      b.data() + (b.cols() - 1) * b.stride() + b.rows());
  return a0 < b1 && b0 < a1;
}

}  // namespace bqrrp
