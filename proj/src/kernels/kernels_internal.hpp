#pragma once

#include "rbws/simd.hpp"

namespace rbws::simd::detail {

extern const KernelTable kScalarTable;
#if defined(RBWS_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace rbws::simd::detail
