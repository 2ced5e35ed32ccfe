// NEON variant of the comparison-count kernel (aarch64 only).

#include "cwmw/kernels.hpp"

#include <arm_neon.h>

namespace cwmw::kernels {

CmpCounts count_lt_le_neon(const double* v, std::size_t n, double x) {
    const float64x2_t xv = vdupq_n_f64(x);
    uint64x2_t lt_acc = vdupq_n_u64(0);
    uint64x2_t le_acc = vdupq_n_u64(0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t vv = vld1q_f64(v + k);
        // Comparison lanes are all-ones (=-1 as signed); accumulate by
        // subtracting so each hit adds one.
        lt_acc = vsubq_u64(lt_acc, vshrq_n_u64(vcltq_f64(vv, xv), 63));
        le_acc = vsubq_u64(le_acc, vshrq_n_u64(vcleq_f64(vv, xv), 63));
    }
    std::int64_t lt = static_cast<std::int64_t>(vgetq_lane_u64(lt_acc, 0) + vgetq_lane_u64(lt_acc, 1));
    std::int64_t le = static_cast<std::int64_t>(vgetq_lane_u64(le_acc, 0) + vgetq_lane_u64(le_acc, 1));
    for (; k < n; ++k) {
        lt += v[k] < x;
        le += v[k] <= x;
    }
    return {lt, le};
}

} // namespace cwmw::kernels
