#pragma once

#include "bregret/kernels.hpp"

namespace bregret::kernels::detail {

#if defined(BREGRET_HAVE_AVX2)
const KernelTable& avx2_table_unchecked();
#endif

}  // namespace bregret::kernels::detail
