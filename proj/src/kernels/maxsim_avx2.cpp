#include "vragent/maxsim.hpp"

#if VRAGENT_X86

#include <immintrin.h>

#include <limits>

namespace vragent::kernels {

namespace {

inline float horizontal_sum(__m256 v) {
    const __m128 lo = _mm256_castps256_ps128(v);
    const __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 0x55));
    return _mm_cvtss_f32(s);
}

inline float dot_avx2(const float* a, const float* b, std::size_t dim) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t k = 0;
    for (; k + 16 <= dim; k += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + k), _mm256_loadu_ps(b + k), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + k + 8), _mm256_loadu_ps(b + k + 8), acc1);
    }
    for (; k + 8 <= dim; k += 8) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + k), _mm256_loadu_ps(b + k), acc0);
    }
    float dot = horizontal_sum(_mm256_add_ps(acc0, acc1));
    for (; k < dim; ++k) {
        dot += a[k] * b[k];
    }
    return dot;
}

}  // namespace

float maxsim_avx2(const float* query, std::size_t q_rows, const float* page,
                  std::size_t p_rows, std::size_t dim) {
    if (q_rows == 0 || p_rows == 0) return 0.0f;
    float total = 0.0f;
    for (std::size_t i = 0; i < q_rows; ++i) {
        const float* q = query + i * dim;
        float best = -std::numeric_limits<float>::infinity();
        for (std::size_t j = 0; j < p_rows; ++j) {
            float dot = dot_avx2(q, page + j * dim, dim);
            if (dot > best) best = dot;
        }
        total += best;
    }
    return total;
}

}  // namespace vragent::kernels

#endif  // VRAGENT_X86
