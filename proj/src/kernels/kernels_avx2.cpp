// AVX2 + FMA kernel variant. Compiled with -mavx2 -mfma; only reached through
// the dispatcher after a CPU feature check.

#include "vqsd/kernels.hpp"

#include <immintrin.h>

namespace vqsd::kernels {
namespace {

// Two complex doubles per register: [re0, im0, re1, im1].
inline __m256d cmul_bcast(__m256d ar, __m256d ai, __m256d b) {
  const __m256d bsw = _mm256_permute_pd(b, 0b0101);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bsw));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// crow[0..m) += alpha * brow[0..m)
inline void axpy_row(cplx alpha, const cplx* brow, cplx* crow, std::size_t m) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  auto* cd = reinterpret_cast<double*>(crow);
  const auto* bd = reinterpret_cast<const double*>(brow);
  std::size_t j = 0;
  for (; j + 2 <= m; j += 2) {
    const __m256d b = _mm256_loadu_pd(bd + 2 * j);
    const __m256d c = _mm256_loadu_pd(cd + 2 * j);
    _mm256_storeu_pd(cd + 2 * j, _mm256_add_pd(c, cmul_bcast(ar, ai, b)));
  }
  for (; j < m; ++j) crow[j] += alpha * brow[j];
}

void gemm(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
          std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n * m; ++i) c[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c.data() + i * m;
    for (std::size_t p = 0; p < k; ++p)
      axpy_row(a[i * k + p], b.data() + p * m, crow, m);
  }
}

void gemm_adj(std::span<const cplx> a, std::span<const cplx> b,
              std::span<cplx> c, std::size_t n, std::size_t k,
              std::size_t m) {
  for (std::size_t i = 0; i < n * m; ++i) c[i] = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const cplx* arow = a.data() + p * n;
    const cplx* brow = b.data() + p * m;
    for (std::size_t i = 0; i < n; ++i)
      axpy_row(std::conj(arow[i]), brow, c.data() + i * m, m);
  }
}

double real_inner(std::span<const cplx> a, std::span<const cplx> b) {
  const auto* ad = reinterpret_cast<const double*>(a.data());
  const auto* bd = reinterpret_cast<const double*>(b.data());
  const std::size_t len = 2 * a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(ad + i), _mm256_loadu_pd(bd + i),
                          acc);
  double out = hsum(acc);
  for (; i < len; ++i) out += ad[i] * bd[i];
  return out;
}

double norm2(std::span<const cplx> a) { return real_inner(a, a); }

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2", gemm, gemm_adj, real_inner, norm2};
  static const bool supported = __builtin_cpu_supports("avx2") &&
                                __builtin_cpu_supports("fma");
  return supported ? &table : nullptr;
}

}  // namespace vqsd::kernels
