#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blas.hpp"
#include "errors.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "pivot_vector.hpp"
#include "pivoting.hpp"
#include "qr_tall.hpp"
#include "qrcp_wide.hpp"
#include "sketch.hpp"

namespace bqrrp {

enum class PermVariant { Sequential, Gather };

struct BqrrpConfig {
  std::int64_t block_size = 32;
  double gamma = 1.0;
  PanelVariant panel = PanelVariant::Householder;
  WideVariant wide = WideVariant::LuQr;
  double rank_tol_factor = 1.0;
  std::uint64_t seed = 0;
  PermVariant perm = PermVariant::Sequential;

  /// Number of sketch rows, ceil(gamma * b).
  std::int64_t sketch_rows() const {
    return static_cast<std::int64_t>(std::ceil(gamma * static_cast<double>(block_size)));
  }
};

/// Subroutine buckets used for runtime breakdowns.
enum class Stage { QrcpWide, TriRank, ColPerm, QrTall, ApplyTransQ, SampleUpdate, Other };
inline constexpr std::size_t kStageCount = 7;
inline constexpr std::array<const char*, kStageCount> kStageNames = {
    "qrcp_wide", "tri_rank", "col_perm", "qr_tall", "apply_trans_q", "sample_update", "other"};

struct IterationRecord {
  std::int64_t start = 0;       // s
  std::int64_t block_rank = 0;  // k
  bool cholesky_fallback = false;
  std::array<std::int64_t, kStageCount> ns{};
};

struct BqrrpDiagnostics {
  std::vector<IterationRecord> iterations;
  std::vector<std::string> warnings;
  std::int64_t total_ns = 0;

  /// Per-stage nanoseconds summed over iterations. "other" is the whole
  /// call minus the named stages, so it includes sketching and setup.
  std::array<std::int64_t, kStageCount> totals() const {
    std::array<std::int64_t, kStageCount> t{};
    std::int64_t named = 0;
    for (const auto& it : iterations)
      for (std::size_t s = 0; s + 1 < kStageCount; ++s) {
        t[s] += it.ns[s];
        named += it.ns[s];
      }
    t[kStageCount - 1] = std::max<std::int64_t>(0, total_ns - named);
    return t;
  }
};

/// Validated copy of cfg for an m-by-n input; LU-based wide QRCP forces
/// gamma = 1 (oversampling cannot change its leading pivots).
inline BqrrpConfig resolve_config(const BqrrpConfig& cfg, std::int64_t m,
                                  std::int64_t n, std::vector<std::string>* warnings) {
  if (m < 1 || n < 1) throw DimensionError("bqrrp: empty input");
  if (cfg.block_size < 1) throw ConfigError("bqrrp: block size must be >= 1");
  if (!(cfg.gamma >= 1.0)) throw ConfigError("bqrrp: gamma must be >= 1");
  if (!(cfg.rank_tol_factor >= 0.0)) throw ConfigError("bqrrp: rank tolerance must be >= 0");
  BqrrpConfig out = cfg;
  if (out.wide == WideVariant::LuQr && out.gamma != 1.0) {
    if (warnings)
      warnings->push_back("gamma reset to 1.0: LU-based wide QRCP ignores oversampling");
    out.gamma = 1.0;
  }
  if (out.sketch_rows() > m)
    throw ConfigError("bqrrp: sketch rows d = ceil(gamma*b) = " +
                      std::to_string(out.sketch_rows()) + " exceed m = " + std::to_string(m));
  return out;
}

/// Block rank of a triangular sketch factor: the longest prefix of the
/// diagonal with |R(j,j)| > tol * u * max(d, w) * |R(0,0)|, capped at k_max.
inline std::int64_t tri_rank(ConstMatrixView r_sk, std::int64_t k_max,
                             double tol_factor = 1.0) {
  const std::int64_t diag = std::min(r_sk.rows(), r_sk.cols());
  k_max = std::min(k_max, diag);
  if (k_max <= 0) return 0;
  const double lead = std::abs(r_sk(0, 0));
  if (lead == 0.0) return 0;
  const double thresh = tol_factor * unit_roundoff *
                        static_cast<double>(std::max(r_sk.rows(), r_sk.cols())) * lead;
  std::int64_t k = 0;
  while (k < k_max && std::abs(r_sk(k, k)) > thresh) ++k;
  return k;
}

/// Refreshes the sketch of the trailing matrix after a full-rank block.
///
/// sk is the current d-by-w sketch window holding R_sk; r11 is the b-by-b
/// triangular block just computed and r12 the b-by-(w - b) block beside it.
/// Afterwards sk(:, b:) holds [R_sk12 - R_sk11 R11^{-1} R12; R_sk22] with
/// the triangle below R_sk22's diagonal zeroed. sk(0:b, 0:b) is left holding
/// R_sk11 R11^{-1}.
inline void sample_update(MatrixView sk, ConstMatrixView r11, ConstMatrixView r12) {
  const std::int64_t b = r11.rows();
  const std::int64_t d = sk.rows();
  const std::int64_t w = sk.cols();
  if (r11.cols() != b || r12.rows() != b || r12.cols() != w - b || d < b)
    throw DimensionError("sample_update: shape mismatch");
  MatrixView x = sk.sub(0, 0, b, b);
  zero_strict_lower(x);
  trsm(Side::Right, Uplo::Upper, Op::NoTrans, Diag::NonUnit, r11, x);
  if (w > b) {
    gemm(-1.0, x, Op::NoTrans, r12, Op::NoTrans, 1.0, sk.sub(0, b, b, w - b));
    if (d > b) zero_strict_lower(sk.sub(b, b, d - b, w - b));
  }
}

namespace detail {

class StageClock {
 public:
  using clock = std::chrono::steady_clock;
  explicit StageClock(std::int64_t& sink) : sink_(sink), t0_(clock::now()) {}
  ~StageClock() {
    sink_ += std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0_).count();
  }

 private:
  std::int64_t& sink_;
  clock::time_point t0_;
};

inline bool column_is_zero(const double* col, std::int64_t len) {
  return std::all_of(col, col + len, [](double x) { return x == 0.0; });
}

}  // namespace detail

/// Blocked randomized QR with column pivoting, in place.
///
/// On return the upper trapezoid of M's first `rank` rows holds R, the
/// Householder vectors of Q sit below the diagonal, tau (length
/// >= min(m, n)) holds their scalars (zero beyond rank), and j receives the
/// one-based gather pivots: M_in(:, j) = Q R. Returns the detected rank.
inline std::int64_t bqrrp_factor_inplace(MatrixView m_in, const BqrrpConfig& config,
                                         std::span<double> tau, std::span<std::int64_t> j,
                                         BqrrpDiagnostics* diag = nullptr) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  const std::int64_t m = m_in.rows();
  const std::int64_t n = m_in.cols();
  std::vector<std::string> warnings;
  const BqrrpConfig cfg = resolve_config(config, m, n, &warnings);
  const std::int64_t kmin = std::min(m, n);
  if (static_cast<std::int64_t>(tau.size()) < kmin || static_cast<std::int64_t>(j.size()) != n)
    throw DimensionError("bqrrp: tau must hold min(m, n) and J n entries");
  const std::int64_t b = cfg.block_size;
  const std::int64_t d = cfg.sketch_rows();

  std::fill(tau.begin(), tau.end(), 0.0);
  for (std::int64_t c = 0; c < n; ++c) j[static_cast<std::size_t>(c)] = c + 1;
  if (diag) {
    diag->iterations.clear();
    diag->warnings = warnings;
  }

  // Sketch; the operator itself lives only inside sketch_apply.
  DenseMatrix msk(d, n);
  sketch_apply(GaussianSketchOp{d, m, cfg.seed}, m_in, msk.view());

  WideQrcpWorkspace wide_ws(d, n, cfg.wide);
  IndexBuffer j_sk(static_cast<std::size_t>(n));
  IndexBuffer own_copy;
  if (cfg.perm == PermVariant::Sequential && wide_ws.perm_copy_.empty())
    own_copy.resize(static_cast<std::size_t>(n));
  IndexBuffer& j_copy = wide_ws.perm_copy_.empty() ? own_copy : wide_ws.perm_copy_;
  DenseMatrix gather_scratch;
  if (cfg.perm == PermVariant::Gather) gather_scratch = DenseMatrix(m, n);
  CholQrWorkspace cqr_ws(cfg.panel == PanelVariant::CholQr ? b : 0);

  std::int64_t rank = 0;
  const std::int64_t iters = (n + b - 1) / b;
  for (std::int64_t i = 0; i < iters; ++i) {
    const std::int64_t s = i * b;
    const std::int64_t c = std::min(n, s + b);
    const std::int64_t bw = c - s;
    const std::int64_t w = n - s;
    const std::int64_t k_max = std::min({b, w, m - s});
    const auto t_iter = clock::now();
    IterationRecord rec;
    rec.start = s;
    auto& ns = rec.ns;
    auto stage = [&ns](Stage st) -> std::int64_t& { return ns[static_cast<std::size_t>(st)]; };
    auto record = [&] {
      if (!diag) return;
      std::int64_t named = 0;
      for (std::size_t k2 = 0; k2 + 1 < kStageCount; ++k2) named += ns[k2];
      const std::int64_t wall =
          std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t_iter).count();
      ns[kStageCount - 1] = std::max<std::int64_t>(0, wall - named);
      diag->iterations.push_back(rec);
    };

    MatrixView sk = msk.sub(0, s, d, w);
    std::span<std::int64_t> jl(j_sk.data(), static_cast<std::size_t>(w));
    {
      detail::StageClock t(stage(Stage::QrcpWide));
      qrcp_wide(cfg.wide, sk, jl, wide_ws);
    }
    std::int64_t k;
    {
      detail::StageClock t(stage(Stage::TriRank));
      k = tri_rank(sk, k_max, cfg.rank_tol_factor);
    }
    rec.block_rank = k;
    {
      // Permuting M(:, s:) covers both the computed rows of R and the
      // working rows of M.
      detail::StageClock t(stage(Stage::ColPerm));
      MatrixView trailing = m_in.cols_from(s);
      if (cfg.perm == PermVariant::Sequential) {
        detail::col_perm_sequential(trailing, jl, {j_copy.data(), static_cast<std::size_t>(w)});
      } else {
        MatrixView scratch = gather_scratch.sub(0, 0, m, w);
        detail::col_perm_gather(trailing, jl, scratch);
        copy_into(scratch, trailing);
      }
      auto j_tail = j.subspan(static_cast<std::size_t>(s));
      detail::sequential_permute(jl, [&](std::int64_t a, std::int64_t bb) {
        std::swap(j_tail[static_cast<std::size_t>(a)], j_tail[static_cast<std::size_t>(bb)]);
      });
    }
    if (detail::column_is_zero(m_in.col_ptr(s) + s, m - s)) {
      rank = s;
      record();
      break;
    }

    MatrixView panel = m_in.sub(s, s, m - s, bw);
    const std::int64_t n_refl = std::min(m - s, bw);
    std::span<double> tau_blk = tau.subspan(static_cast<std::size_t>(s), static_cast<std::size_t>(n_refl));
    {
      detail::StageClock t(stage(Stage::QrTall));
      if (cfg.panel == PanelVariant::Householder) {
        qr_tall_hqr(panel, tau_blk);
      } else {
        rec.cholesky_fallback = qr_tall_cqr(panel, sk, k, tau_blk, cqr_ws);
      }
    }
    if (c < n && k > 0) {
      detail::StageClock t(stage(Stage::ApplyTransQ));
      ReflectorBlock q{panel.sub(0, 0, m - s, k), tau_blk.subspan(0, static_cast<std::size_t>(k))};
      apply_qt(q, m_in.sub(s, c, m - s, n - c));
    }

    const bool terminal = k != k_max || c == n || s + k == m;
    if (terminal) {
      rank = s + k;
      std::fill(tau_blk.begin() + k, tau_blk.end(), 0.0);
      record();
      break;
    }
    {
      detail::StageClock t(stage(Stage::SampleUpdate));
      sample_update(sk, m_in.sub(s, s, b, b), m_in.sub(s, c, b, n - c));
    }
    record();
  }

  if (diag)
    diag->total_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t_start).count();
  return rank;
}

/// Result of an out-of-place factorization, in GEQP3 layout.
struct BqrrpOutput {
  std::int64_t rank = 0;
  DenseMatrix factored;
  std::vector<double> tau;
  PivotVector j;
  BqrrpDiagnostics diagnostics;

  /// The rank reflectors that define Q.
  ReflectorBlock q() const {
    return {factored.sub(0, 0, factored.rows(), rank),
            std::span<const double>(tau.data(), static_cast<std::size_t>(rank))};
  }

  /// R(0:rank, :) as an explicit upper trapezoid.
  DenseMatrix r() const {
    return upper_trapezoid(factored.sub(0, 0, rank, factored.cols()));
  }
};

inline BqrrpOutput bqrrp_factor(ConstMatrixView m, const BqrrpConfig& cfg) {
  BqrrpOutput out;
  out.factored = DenseMatrix::copy_of(m);
  out.tau.assign(static_cast<std::size_t>(std::min(m.rows(), m.cols())), 0.0);
  out.j = PivotVector(m.cols());
  out.rank = bqrrp_factor_inplace(out.factored.view(), cfg, out.tau, out.j.span(),
                                  &out.diagnostics);
  return out;
}

/// Leading ncols columns of Q (built from the rank reflectors).
inline DenseMatrix explicit_q(const BqrrpOutput& out, std::int64_t ncols) {
  if (ncols > out.factored.rows() || ncols < 0)
    throw DimensionError("explicit_q: ncols exceeds m");
  return form_q(out.q(), ncols);
}

/// ||M(:, J) - Q(:, 0:rank) R(0:rank, :)||_F / ||M||_F, zero for M = 0.
inline double reconstruct_residual(ConstMatrixView m_orig, const BqrrpOutput& out) {
  const std::int64_t m = m_orig.rows();
  const std::int64_t n = m_orig.cols();
  if (out.factored.rows() != m || out.factored.cols() != n || out.j.size() != n)
    throw DimensionError("reconstruct_residual: shape mismatch");
  const double norm_m = frobenius_norm(m_orig);
  if (norm_m == 0.0) return 0.0;
  DenseMatrix qr(m, n);
  for (std::int64_t c = 0; c < n; ++c)
    for (std::int64_t r = 0; r <= std::min(c, out.rank - 1); ++r) qr(r, c) = out.factored(r, c);
  apply_q(out.q(), qr.view());
  for (std::int64_t c = 0; c < n; ++c) {
    const double* src = m_orig.col_ptr(out.j.source(c));
    for (std::int64_t r = 0; r < m; ++r) qr(r, c) -= src[r];
  }
  return frobenius_norm(qr) / norm_m;
}

}  // namespace bqrrp
