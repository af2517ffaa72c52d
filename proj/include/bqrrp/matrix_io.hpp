#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "errors.hpp"
#include "matrix.hpp"

namespace bqrrp {

// BQM1 layout: "BQM1", u64 rows, u64 cols, rows*cols binary64 column-major.
// Everything little-endian.

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8))
    throw FormatError("BQM1: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline void write_bqm(std::ostream& out, ConstMatrixView a) {
  out.write("BQM1", 4);
  detail::put_u64(out, static_cast<std::uint64_t>(a.rows()));
  detail::put_u64(out, static_cast<std::uint64_t>(a.cols()));
  for (std::int64_t j = 0; j < a.cols(); ++j)
    for (std::int64_t i = 0; i < a.rows(); ++i)
      detail::put_u64(out, std::bit_cast<std::uint64_t>(a(i, j)));
  if (!out) throw FormatError("BQM1: write failed");
}

inline DenseMatrix read_bqm(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "BQM1", 4) != 0)
    throw FormatError("BQM1: bad magic");
  const auto rows = detail::get_u64(in);
  const auto cols = detail::get_u64(in);
  constexpr std::uint64_t limit = std::uint64_t{1} << 31;
  if (rows > limit || cols > limit || (rows && cols > (limit * 16) / rows))
    throw FormatError("BQM1: implausible dimensions");
  DenseMatrix a(static_cast<std::int64_t>(rows), static_cast<std::int64_t>(cols));
  for (std::int64_t j = 0; j < a.cols(); ++j)
    for (std::int64_t i = 0; i < a.rows(); ++i) {
      try {
        a(i, j) = std::bit_cast<double>(detail::get_u64(in));
      } catch (const FormatError&) {
        throw FormatError("BQM1: truncated payload");
      }
    }
  return a;
}

inline void save_bqm(const std::string& path, ConstMatrixView a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_bqm(out, a);
}

inline DenseMatrix load_bqm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_bqm(in);
}

}  // namespace bqrrp
