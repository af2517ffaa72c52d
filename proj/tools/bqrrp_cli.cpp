// bqrrp command-line front end.
//
//   bqrrp factorize --input A.bqm --output out [-b 32] [--gamma 1] [--panel hqr|cqr]
//                   [--wide luqr|ref] [--perm seq|gather] [--seed 0]
//   bqrrp bench     --m 256,512 --n 256 --b 32,64 [--variants hqr,cqr] [--trials 5] --csv f
//   bqrrp profile   --m 1024 --n 1024 --b 64,128 [--variant hqr] --csv f
//   bqrrp quality   --n 256 --p 10 --theta 1.2 --b 16,256 --csv f
//   bqrrp generate  --kind gaussian|kahan --m 64 --n 64 --output A.bqm
//
// Exit codes: 0 ok, 2 I/O, 3 configuration, 4 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <bqrrp.hpp>
#include <bqrrp/bench.hpp>

namespace {

constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumeric = 4;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw bqrrp::FormatError("cannot open " + path + " for writing");
  return out;
}

void check_written(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw bqrrp::FormatError("write failed: " + path);
}

struct FactorizeArgs {
  std::string input, prefix;
  std::int64_t b = 32;
  double gamma = 1.0;
  std::string panel = "hqr", wide = "luqr", perm = "seq";
  std::uint64_t seed = 0;
};

int cmd_factorize(const FactorizeArgs& a) {
  using namespace bqrrp;
  BqrrpConfig cfg;
  cfg.block_size = a.b;
  cfg.gamma = a.gamma;
  cfg.panel = bench::parse_panel(a.panel);
  cfg.wide = bench::parse_wide(a.wide);
  cfg.perm = bench::parse_perm(a.perm);
  cfg.seed = a.seed;
  const DenseMatrix m = load_bqm(a.input);
  const BqrrpOutput out = bqrrp_factor(m, cfg);
  for (const auto& w : out.diagnostics.warnings) std::cerr << "warning: " << w << '\n';

  // R as an explicit upper trapezoid and the reflectors as a unit-free
  // strictly lower trapezoid (the unit diagonal is implicit).
  save_bqm(a.prefix + ".R.bqm", out.r());
  DenseMatrix v(m.rows(), out.rank);
  for (std::int64_t j = 0; j < out.rank; ++j)
    for (std::int64_t i = j + 1; i < m.rows(); ++i) v(i, j) = out.factored(i, j);
  save_bqm(a.prefix + ".V.bqm", v);

  auto tau_out = open_out(a.prefix + ".tau.csv");
  tau_out << "tau\n";
  for (double t : out.tau) tau_out << bench::fmt(t) << '\n';
  check_written(tau_out, a.prefix + ".tau.csv");

  auto j_out = open_out(a.prefix + ".J.csv");
  j_out << "j\n";
  for (std::int64_t j = 0; j < out.j.size(); ++j) j_out << out.j[j] << '\n';
  check_written(j_out, a.prefix + ".J.csv");

  std::cout << "rank " << out.rank << '\n';
  return 0;
}

struct GenerateArgs {
  std::string kind = "gaussian", output;
  std::int64_t m = 64, n = 64;
  double p = 10.0, theta = 1.2;
  bool printed = false;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateArgs& a) {
  using namespace bqrrp;
  if (a.kind == "gaussian") {
    save_bqm(a.output, gen_gaussian(a.m, a.n, a.seed));
  } else if (a.kind == "kahan") {
    save_bqm(a.output, gen_kahan({a.n, a.p, a.theta}, !a.printed));
  } else {
    throw ConfigError("unknown matrix kind '" + a.kind + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized blocked QR with column pivoting"};
  app.require_subcommand(1);

  FactorizeArgs fa;
  auto* fac = app.add_subcommand("factorize", "Factor a BQM1 matrix file");
  fac->add_option("-i,--input", fa.input, "Input matrix (BQM1)")->required();
  fac->add_option("-o,--output", fa.prefix, "Output prefix")->required();
  fac->add_option("-b,--block-size", fa.b, "Block size");
  fac->add_option("--gamma", fa.gamma, "Sketch oversampling factor");
  fac->add_option("--panel", fa.panel, "Panel QR: hqr or cqr");
  fac->add_option("--wide", fa.wide, "Sketch QRCP: luqr or ref");
  fac->add_option("--perm", fa.perm, "Column permutation: seq or gather");
  fac->add_option("--seed", fa.seed, "Sketch seed");

  bqrrp::bench::BenchOptions bo;
  std::string bench_csv;
  auto* ben = app.add_subcommand("bench", "Timing sweep over sizes and block sizes");
  ben->add_option("--m", bo.ms, "Row counts")->delimiter(',');
  ben->add_option("--n", bo.ns, "Column counts")->delimiter(',');
  ben->add_option("-b,--b", bo.bs, "Block sizes")->delimiter(',');
  ben->add_option("--variants", bo.variants, "Panel variants")->delimiter(',');
  ben->add_option("--gamma", bo.gamma, "Sketch oversampling factor");
  ben->add_option("--trials", bo.trials, "Trials per configuration");
  ben->add_option("--seed", bo.seed, "Matrix and sketch seed");
  ben->add_flag("!--no-reference", bo.with_reference, "Skip the reference QRCP");
  ben->add_flag("!--no-geqrf", bo.with_geqrf, "Skip unpivoted QR");
  ben->add_option("--csv", bench_csv, "Output CSV")->required();

  std::int64_t pm = 1024, pn = 1024;
  std::vector<std::int64_t> pbs{128};
  std::string pvariant = "hqr", prof_csv;
  std::uint64_t pseed = 0;
  auto* prof = app.add_subcommand("profile", "Per-subroutine runtime percentages");
  prof->add_option("--m", pm, "Rows");
  prof->add_option("--n", pn, "Columns");
  prof->add_option("-b,--b", pbs, "Block sizes")->delimiter(',');
  prof->add_option("--variant", pvariant, "Panel variant");
  prof->add_option("--seed", pseed, "Matrix and sketch seed");
  prof->add_option("--csv", prof_csv, "Output CSV")->required();

  bqrrp::KahanParams kp{256, 10.0, 1.2};
  std::vector<std::int64_t> qbs{16, 256};
  bool printed = false;
  std::string qual_csv;
  auto* qual = app.add_subcommand("quality", "Pivot quality on a Kahan matrix");
  qual->add_option("--n", kp.n, "Order");
  qual->add_option("--p", kp.p, "Perturbation scale");
  qual->add_option("--theta", kp.theta, "Angle in (0, pi)");
  qual->add_option("-b,--b", qbs, "Block sizes")->delimiter(',');
  qual->add_flag("--printed", printed, "Use beta on the diagonal instead of the gallery form");
  qual->add_option("--csv", qual_csv, "Output CSV")->required();

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a test matrix in BQM1 format");
  gen->add_option("--kind", ga.kind, "gaussian or kahan");
  gen->add_option("--m", ga.m, "Rows (gaussian)");
  gen->add_option("--n", ga.n, "Columns");
  gen->add_option("--p", ga.p, "Kahan perturbation scale");
  gen->add_option("--theta", ga.theta, "Kahan angle");
  gen->add_flag("--printed", ga.printed, "Kahan with beta on the diagonal");
  gen->add_option("--seed", ga.seed, "Seed (gaussian)");
  gen->add_option("-o,--output", ga.output, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*fac) return cmd_factorize(fa);
    if (*gen) return cmd_generate(ga);
    if (*ben) {
      auto out = open_out(bench_csv);
      auto rows = bqrrp::bench::run_bench(bo);
      bqrrp::bench::write_bench_csv(out, rows);
      check_written(out, bench_csv);
      return 0;
    }
    if (*prof) {
      auto out = open_out(prof_csv);
      auto rows = bqrrp::bench::run_profile(pm, pn, pbs, pvariant, pseed);
      bqrrp::bench::write_profile_csv(out, rows);
      check_written(out, prof_csv);
      return 0;
    }
    if (*qual) {
      auto out = open_out(qual_csv);
      auto rep = bqrrp::bench::run_quality(kp, !printed, qbs);
      bqrrp::bench::write_quality_csv(out, rep);
      check_written(out, qual_csv);
      return 0;
    }
  } catch (const bqrrp::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const bqrrp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bqrrp::UsageError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bqrrp::DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bqrrp::ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const bqrrp::SingularError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
