#pragma once

#include "icsa/kernels.hpp"

namespace icsa::kernels {

#if defined(ICSA_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(ICSA_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace icsa::kernels
