#include "vqsd/kernels.hpp"

namespace vqsd::kernels {
namespace {

void gemm(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
          std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const cplx aip = a[i * k + p];
      const cplx* brow = b.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_adj(std::span<const cplx> a, std::span<const cplx> b,
              std::span<cplx> c, std::size_t n, std::size_t k,
              std::size_t m) {
  for (std::size_t i = 0; i < n * m; ++i) c[i] = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const cplx* arow = a.data() + p * n;
    const cplx* brow = b.data() + p * m;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx api = std::conj(arow[i]);
      cplx* crow = c.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += api * brow[j];
    }
  }
}

double real_inner(std::span<const cplx> a, std::span<const cplx> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return acc;
}

double norm2(std::span<const cplx> a) {
  double acc = 0.0;
  for (const auto& z : a) acc += std::norm(z);
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", gemm, gemm_adj, real_inner, norm2};
  return table;
}

}  // namespace vqsd::kernels
