#pragma once

#include "quip/kernels.hpp"

namespace quip::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Table;
#endif
#if defined(__aarch64__)
extern const KernelTable kNeonTable;
#endif

}  // namespace quip::kernels::detail
