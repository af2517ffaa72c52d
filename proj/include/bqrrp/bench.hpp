#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "bqrrp.hpp"
#include "errors.hpp"
#include "factor.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "quality.hpp"

namespace bqrrp::bench {

// Locale-independent shortest round-trip formatting.
inline std::string fmt(double x) {
  if (x != x) return "nan";
  if (x == std::numeric_limits<double>::infinity()) return "inf";
  if (x == -std::numeric_limits<double>::infinity()) return "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

inline std::string fmt_fixed(double x, int digits) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, digits);
  return std::string(buf.data(), res.ptr);
}

inline PanelVariant parse_panel(const std::string& s) {
  if (s == "hqr") return PanelVariant::Householder;
  if (s == "cqr") return PanelVariant::CholQr;
  throw ConfigError("unknown panel variant '" + s + "' (expected hqr or cqr)");
}

inline const char* panel_name(PanelVariant v) {
  return v == PanelVariant::Householder ? "hqr" : "cqr";
}

inline WideVariant parse_wide(const std::string& s) {
  if (s == "luqr") return WideVariant::LuQr;
  if (s == "ref" || s == "reference") return WideVariant::Reference;
  throw ConfigError("unknown wide variant '" + s + "' (expected luqr or ref)");
}

inline PermVariant parse_perm(const std::string& s) {
  if (s == "seq" || s == "sequential") return PermVariant::Sequential;
  if (s == "gather") return PermVariant::Gather;
  throw ConfigError("unknown permutation variant '" + s + "' (expected seq or gather)");
}

inline constexpr const char* kBenchHeader =
    "algo,m,n,b,gamma,variant,trial,wall_ns,gflops_canonical";

struct BenchRecord {
  std::string algo;
  std::int64_t m = 0, n = 0, b = 0;
  double gamma = 1.0;
  std::string variant;
  std::int64_t trial = 0;  // -1 marks the best-of-trials row
  std::int64_t wall_ns = 1;
  double gflops_canonical = 0.0;
};

/// Canonical rate: geqrf_flops(m, n) per nanosecond, i.e. GFLOP/s.
inline double canonical_gflops(std::int64_t m, std::int64_t n, std::int64_t wall_ns) {
  return geqrf_flops(m, n) / static_cast<double>(std::max<std::int64_t>(wall_ns, 1));
}

inline void write_record(std::ostream& os, const BenchRecord& r) {
  os << r.algo << ',' << r.m << ',' << r.n << ',' << r.b << ',' << fmt(r.gamma) << ','
     << r.variant << ',' << (r.trial < 0 ? std::string("best") : std::to_string(r.trial)) << ','
     << r.wall_ns << ',' << fmt(r.gflops_canonical) << '\n';
}

struct BenchOptions {
  std::vector<std::int64_t> ms{256};
  std::vector<std::int64_t> ns{256};
  std::vector<std::int64_t> bs{32};
  std::vector<std::string> variants{"hqr"};
  double gamma = 1.0;
  int trials = 5;
  std::uint64_t seed = 0;
  bool with_reference = true;
  bool with_geqrf = true;
};

namespace detail {

struct BenchCase {
  std::string algo;
  std::int64_t b = 0;
  double gamma = 1.0;
  std::string variant;
};

inline std::int64_t time_case(const BenchCase& bc, ConstMatrixView a, std::uint64_t seed) {
  DenseMatrix work = DenseMatrix::copy_of(a);
  const std::int64_t kmin = std::min(a.rows(), a.cols());
  std::vector<double> tau(static_cast<std::size_t>(kmin));
  std::vector<std::int64_t> j(static_cast<std::size_t>(a.cols()));
  BqrrpConfig cfg;
  if (bc.algo == "bqrrp") {
    cfg.block_size = bc.b;
    cfg.gamma = bc.gamma;
    cfg.panel = parse_panel(bc.variant);
    cfg.seed = seed;
    resolve_config(cfg, a.rows(), a.cols(), nullptr);
  }
  const auto t0 = std::chrono::steady_clock::now();
  if (bc.algo == "bqrrp") {
    bqrrp_factor_inplace(work.view(), cfg, tau, j);
  } else if (bc.algo == "qrcp_reference") {
    qrcp_reference(work.view(), tau, j);
  } else {
    qr_unpivoted(work.view(), tau);
  }
  const auto t1 = std::chrono::steady_clock::now();
  return std::max<std::int64_t>(
      1, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
}

}  // namespace detail

/// Benchmark sweep. All algorithms for a size run once before any repeats;
/// each configuration emits its raw rows followed by its best row.
inline std::vector<BenchRecord> run_bench(const BenchOptions& opt) {
  if (opt.trials < 1) throw ConfigError("bench: trials must be >= 1");
  std::vector<BenchRecord> rows;
  for (std::int64_t m : opt.ms) {
    for (std::int64_t n : opt.ns) {
      std::vector<detail::BenchCase> cases;
      for (std::int64_t b : opt.bs)
        for (const auto& v : opt.variants) {
          parse_panel(v);
          cases.push_back({"bqrrp", b, opt.gamma, v});
        }
      if (opt.with_reference) cases.push_back({"qrcp_reference", 0, 1.0, "none"});
      if (opt.with_geqrf) cases.push_back({"geqrf", 0, 1.0, "none"});

      const DenseMatrix a = gen_gaussian(m, n, opt.seed);
      std::vector<std::vector<std::int64_t>> times(cases.size());
      for (int t = 0; t < opt.trials; ++t)
        for (std::size_t c = 0; c < cases.size(); ++c)
          times[c].push_back(detail::time_case(cases[c], a, opt.seed));

      for (std::size_t c = 0; c < cases.size(); ++c) {
        const auto& bc = cases[c];
        BenchRecord rec{bc.algo, m, n, bc.b, bc.gamma, bc.variant, 0, 1, 0.0};
        for (int t = 0; t < opt.trials; ++t) {
          rec.trial = t;
          rec.wall_ns = times[c][static_cast<std::size_t>(t)];
          rec.gflops_canonical = canonical_gflops(m, n, rec.wall_ns);
          rows.push_back(rec);
        }
        rec.trial = -1;
        rec.wall_ns = *std::min_element(times[c].begin(), times[c].end());
        rec.gflops_canonical = canonical_gflops(m, n, rec.wall_ns);
        rows.push_back(rec);
      }
    }
  }
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& rows) {
  os << kBenchHeader << '\n';
  for (const auto& r : rows) write_record(os, r);
}

struct ProfileRow {
  std::int64_t m = 0, n = 0, b = 0;
  std::string variant;
  std::array<double, kStageCount> percent{};
};

inline std::string profile_header() {
  std::string h = "m,n,b,variant";
  for (const char* name : kStageNames) {
    h += ',';
    h += name;
  }
  return h;
}

inline std::array<double, kStageCount> stage_percentages(const BqrrpDiagnostics& diag) {
  const auto tot = diag.totals();
  std::int64_t sum = 0;
  for (auto t : tot) sum += t;
  std::array<double, kStageCount> pct{};
  if (sum <= 0) {
    pct[kStageCount - 1] = 100.0;
    return pct;
  }
  for (std::size_t s = 0; s < kStageCount; ++s)
    pct[s] = 100.0 * static_cast<double>(tot[s]) / static_cast<double>(sum);
  return pct;
}

inline std::vector<ProfileRow> run_profile(std::int64_t m, std::int64_t n,
                                           const std::vector<std::int64_t>& bs,
                                           const std::string& variant, std::uint64_t seed) {
  const DenseMatrix a = gen_gaussian(m, n, seed);
  std::vector<ProfileRow> rows;
  for (std::int64_t b : bs) {
    BqrrpConfig cfg;
    cfg.block_size = b;
    cfg.panel = parse_panel(variant);
    cfg.seed = seed;
    const BqrrpOutput out = bqrrp_factor(a, cfg);
    rows.push_back({m, n, b, variant, stage_percentages(out.diagnostics)});
  }
  return rows;
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows) {
  os << profile_header() << '\n';
  for (const auto& r : rows) {
    os << r.m << ',' << r.n << ',' << r.b << ',' << r.variant;
    for (double p : r.percent) os << ',' << fmt_fixed(p, 4);
    os << '\n';
  }
}

inline constexpr const char* kQualityHeader =
    "b,i,trailing_ratio,ref_diag_over_sigma,bqrrp_diag_over_sigma";

struct QualitySeries {
  std::int64_t b = 0;
  std::int64_t rank = 0;
  std::vector<double> trailing_ratio;
  std::vector<double> bqrrp_diag_over_sigma;
};

struct QualityReport {
  std::vector<double> sigma;
  std::vector<double> ref_diag_over_sigma;
  std::vector<QualitySeries> series;
};

/// Ratio of trailing Frobenius norms ||R_ref(i:, i:)|| / ||R_bqrrp(i:, i:)||
/// for i below both ranks (0/0 counts as 1).
inline std::vector<double> trailing_ratio(const std::vector<double>& f_ref,
                                          const std::vector<double>& f_alg) {
  const std::size_t len = std::min(f_ref.size(), f_alg.size());
  std::vector<double> r(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (f_alg[i] == 0.0)
      r[i] = f_ref[i] == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else
      r[i] = f_ref[i] / f_alg[i];
  }
  return r;
}

inline QualityReport run_quality(const KahanParams& kp, bool classical,
                                 const std::vector<std::int64_t>& bs, std::uint64_t seed = 0) {
  if (kp.n > 1024) throw ConfigError("quality: n must be <= 1024");
  const DenseMatrix k = gen_kahan(kp, classical);
  QualityReport rep;
  rep.sigma = jacobi_svd_values(k);

  DenseMatrix ref = DenseMatrix::copy_of(k);
  std::vector<double> tau(static_cast<std::size_t>(kp.n));
  PivotVector jp(kp.n);
  qrcp_reference(ref.view(), tau, jp);
  const DenseMatrix r_ref = upper_trapezoid(ref);
  rep.ref_diag_over_sigma = diag_over_sigma(r_ref, rep.sigma);
  const auto f_ref = trailing_frobenius_profile(r_ref);

  for (std::int64_t b : bs) {
    BqrrpConfig cfg;
    cfg.block_size = b;
    cfg.seed = seed;
    const BqrrpOutput out = bqrrp_factor(k, cfg);
    const DenseMatrix r = out.r();
    QualitySeries s;
    s.b = b;
    s.rank = out.rank;
    s.trailing_ratio = trailing_ratio(f_ref, trailing_frobenius_profile(r));
    s.bqrrp_diag_over_sigma = diag_over_sigma(r, rep.sigma);
    rep.series.push_back(std::move(s));
  }
  return rep;
}

inline void write_quality_csv(std::ostream& os, const QualityReport& rep) {
  os << kQualityHeader << '\n';
  for (const auto& s : rep.series) {
    for (std::size_t i = 0; i < s.trailing_ratio.size(); ++i) {
      os << s.b << ',' << i << ',' << fmt(s.trailing_ratio[i]) << ','
         << fmt(rep.ref_diag_over_sigma[i]) << ',' << fmt(s.bqrrp_diag_over_sigma[i]) << '\n';
    }
  }
}

/// Median of the first `count` entries (upper median for even counts).
inline double median_prefix(const std::vector<double>& v, std::size_t count) {
  count = std::min(count, v.size());
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> head(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(count));
  std::nth_element(head.begin(), head.begin() + static_cast<std::ptrdiff_t>(count / 2), head.end());
  return head[count / 2];
}

}  // namespace bqrrp::bench
