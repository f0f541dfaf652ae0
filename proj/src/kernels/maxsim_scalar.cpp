#include "vragent/maxsim.hpp"

#include <limits>

namespace vragent::kernels {

float maxsim_scalar(const float* query, std::size_t q_rows, const float* page,
                    std::size_t p_rows, std::size_t dim) {
    if (q_rows == 0 || p_rows == 0) return 0.0f;
    float total = 0.0f;
    for (std::size_t i = 0; i < q_rows; ++i) {
        const float* q = query + i * dim;
        float best = -std::numeric_limits<float>::infinity();
        for (std::size_t j = 0; j < p_rows; ++j) {
            const float* d = page + j * dim;
            float dot = 0.0f;
            for (std::size_t k = 0; k < dim; ++k) {
                dot += q[k] * d[k];
            }
            if (dot > best) best = dot;
        }
        total += best;
    }
    return total;
}

}  // namespace vragent::kernels
