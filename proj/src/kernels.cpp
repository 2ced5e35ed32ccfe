#include "cwmw/kernels.hpp"

#include <atomic>

namespace cwmw::kernels {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

CmpCounts count_lt_le_scalar(const double* v, std::size_t n, double x) {
    std::int64_t lt = 0;
    std::int64_t le = 0;
    for (std::size_t k = 0; k < n; ++k) {
        lt += v[k] < x;
        le += v[k] <= x;
    }
    return {lt, le};
}

namespace {

using KernelFn = CmpCounts (*)(const double*, std::size_t, double);

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(CWMW_HAVE_AVX2_BUILD)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::neon:
#if defined(CWMW_HAVE_NEON_BUILD)
            return true; // NEON is baseline on aarch64
#else
            return false;
#endif
    }
    return false;
}

KernelFn fn_for(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return &count_lt_le_scalar;
        case Isa::avx2:
#if defined(CWMW_HAVE_AVX2_BUILD)
            return &count_lt_le_avx2;
#else
            return &count_lt_le_scalar;
#endif
        case Isa::neon:
#if defined(CWMW_HAVE_NEON_BUILD)
            return &count_lt_le_neon;
#else
            return &count_lt_le_scalar;
#endif
    }
    return &count_lt_le_scalar;
}

Isa detect_isa() {
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

struct Dispatch {
    std::atomic<Isa> isa;
    std::atomic<KernelFn> fn;
    Dispatch() {
        const Isa best = detect_isa();
        isa.store(best, std::memory_order_relaxed);
        fn.store(fn_for(best), std::memory_order_relaxed);
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

} // namespace

Isa active_isa() { return dispatch().isa.load(std::memory_order_relaxed); }

bool force_isa(Isa isa) {
    if (!isa_available(isa)) return false;
    dispatch().isa.store(isa, std::memory_order_relaxed);
    dispatch().fn.store(fn_for(isa), std::memory_order_relaxed);
    return true;
}

CmpCounts count_lt_le(const double* v, std::size_t n, double x) {
    return dispatch().fn.load(std::memory_order_relaxed)(v, n, x);
}

} // namespace cwmw::kernels
