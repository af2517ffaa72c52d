// Factor a Gaussian matrix and check the result.
#include <cstdio>

#include <bqrrp.hpp>

int main() {
  using namespace bqrrp;
  const DenseMatrix a = gen_gaussian(300, 200, 42);

  BqrrpConfig cfg;
  cfg.block_size = 32;
  cfg.panel = PanelVariant::CholQr;
  const BqrrpOutput out = bqrrp_factor(a, cfg);

  std::printf("rank %lld, residual %.3e\n", static_cast<long long>(out.rank),
              reconstruct_residual(a, out));
  std::printf("first pivots:");
  for (std::int64_t j = 0; j < 5; ++j) std::printf(" %lld", static_cast<long long>(out.j[j]));
  std::printf("\n");
  return 0;
}
