#pragma once

#include <cstddef>

namespace vragent::kernels {

// Late-interaction similarity: sum over query rows of the max over page
// rows of the dot product. Row-major contiguous inputs, shared dim.
// q_rows == 0 or p_rows == 0 yields 0.
using MaxSimFn = float (*)(const float* query, std::size_t q_rows, const float* page,
                           std::size_t p_rows, std::size_t dim);

// Reference kernel; ground truth for equivalence tests.
float maxsim_scalar(const float* query, std::size_t q_rows, const float* page,
                    std::size_t p_rows, std::size_t dim);

#if defined(__x86_64__) || defined(_M_X64)
#define VRAGENT_X86 1
// Compiled only when the toolchain supports -mavx2 -mfma; called only when
// the CPU reports both features.
float maxsim_avx2(const float* query, std::size_t q_rows, const float* page,
                  std::size_t p_rows, std::size_t dim);
#else
#define VRAGENT_X86 0
#endif

struct CpuFeatures {
    bool avx2 = false;
    bool fma = false;

    static const CpuFeatures& get();
};

// Best kernel for this CPU; `force_scalar` pins the reference path.
MaxSimFn select_maxsim_kernel(bool force_scalar = false);
const char* selected_maxsim_kernel_name(bool force_scalar = false);

}  // namespace vragent::kernels
