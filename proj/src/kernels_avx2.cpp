// AVX2 variant of the comparison-count kernel. Compiled with -mavx2 and
// invoked only after the runtime CPU probe in kernels.cpp succeeds.

#include "cwmw/kernels.hpp"

#include <immintrin.h>

namespace cwmw::kernels {

CmpCounts count_lt_le_avx2(const double* v, std::size_t n, double x) {
    const __m256d xv = _mm256_set1_pd(x);
    std::int64_t lt = 0;
    std::int64_t le = 0;
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d vv = _mm256_loadu_pd(v + k);
        // Ordered, non-signaling predicates; inputs are validated finite at
        // ingestion, so these match the scalar <, <= exactly.
        const int mlt = _mm256_movemask_pd(_mm256_cmp_pd(vv, xv, _CMP_LT_OQ));
        const int mle = _mm256_movemask_pd(_mm256_cmp_pd(vv, xv, _CMP_LE_OQ));
        lt += __builtin_popcount(static_cast<unsigned>(mlt));
        le += __builtin_popcount(static_cast<unsigned>(mle));
    }
    for (; k < n; ++k) {
        lt += v[k] < x;
        le += v[k] <= x;
    }
    return {lt, le};
}

} // namespace cwmw::kernels
