#include "vragent/maxsim.hpp"

namespace vragent::kernels {

const CpuFeatures& CpuFeatures::get() {
    static const CpuFeatures features = [] {
        CpuFeatures f;
#if VRAGENT_X86 && (defined(__GNUC__) || defined(__clang__))
        f.avx2 = __builtin_cpu_supports("avx2");
        f.fma = __builtin_cpu_supports("fma");
#endif
        return f;
    }();
    return features;
}

MaxSimFn select_maxsim_kernel(bool force_scalar) {
    if (force_scalar) return maxsim_scalar;
#if VRAGENT_X86
    const auto& f = CpuFeatures::get();
    if (f.avx2 && f.fma) return maxsim_avx2;
#endif
    return maxsim_scalar;
}

const char* selected_maxsim_kernel_name(bool force_scalar) {
    if (force_scalar) return "scalar";
#if VRAGENT_X86
    const auto& f = CpuFeatures::get();
    if (f.avx2 && f.fma) return "avx2";
#endif
    return "scalar";
}

}  // namespace vragent::kernels
