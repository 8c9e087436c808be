#include <cstdlib>
#include <string_view>

#include "vqsd/kernels.hpp"

namespace vqsd::kernels {

#if !VQSD_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("VQSD_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar")
    return scalar_table();
  if (const KernelTable* t = avx2_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace vqsd::kernels
