#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

// Dense complex inner-loop kernels. Every routine has a portable scalar
// reference implementation; vectorized variants are compiled into separate
// translation units and chosen once at runtime from the host CPU features.
//
// Storage is row-major std::complex<double>, i.e. interleaved (re, im).

namespace vqsd::kernels {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;

  // c (n x m) = a (n x k) * b (k x m)
  void (*gemm)(std::span<const cplx> a, std::span<const cplx> b,
               std::span<cplx> c, std::size_t n, std::size_t k,
               std::size_t m);

  // c (n x m) = a^dagger * b, with a stored as (k x n) and b as (k x m)
  void (*gemm_adj)(std::span<const cplx> a, std::span<const cplx> b,
                   std::span<cplx> c, std::size_t n, std::size_t k,
                   std::size_t m);

  // Re sum_i conj(a_i) b_i. For Hermitian A, B this is Re Tr[A B].
  double (*real_inner)(std::span<const cplx> a, std::span<const cplx> b);

  // sum_i |a_i|^2
  double (*norm2)(std::span<const cplx> a);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();

// The table used by the library. Picked on first use: AVX2 when available,
// scalar otherwise. VQSD_KERNELS=scalar|avx2 forces a choice.
const KernelTable& active();

}  // namespace vqsd::kernels
