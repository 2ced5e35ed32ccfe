#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace cwmw::kernels {

// Result of comparing every element of a vector against a scalar.
// lt counts v[k] < x, le counts v[k] <= x; both are exact integer counts,
// so every ISA variant produces bit-identical downstream values.
struct CmpCounts {
    std::int64_t lt = 0;
    std::int64_t le = 0;
};

enum class Isa {
    scalar,
    avx2,
    neon,
};

std::string_view isa_name(Isa isa);

// ISA selected by the runtime dispatcher (CPU feature probe at first use).
Isa active_isa();

// Force a specific variant (used by equivalence tests and benchmarking).
// Returns false and leaves the selection unchanged if the requested ISA is
// not available in this build/CPU.
bool force_isa(Isa isa);

// Count strict and non-strict comparisons of v[0..n) against x.
// Inputs must be finite; NaN handling is unspecified.
CmpCounts count_lt_le(const double* v, std::size_t n, double x);

inline CmpCounts count_lt_le(std::span<const double> v, double x) {
    return count_lt_le(v.data(), v.size(), x);
}

// Sum over k of the tie-aware comparison kernel h(v[k], x), where
// h(a, b) = 1 if a < b, 1/2 if a == b, 0 otherwise. Equals (lt + le) / 2.
inline double h_sum(std::span<const double> v, double x) {
    const CmpCounts c = count_lt_le(v.data(), v.size(), x);
    return 0.5 * static_cast<double>(c.lt + c.le);
}

// Reference implementation; also the fallback on CPUs without SIMD support.
CmpCounts count_lt_le_scalar(const double* v, std::size_t n, double x);

#if defined(CWMW_HAVE_AVX2_BUILD)
CmpCounts count_lt_le_avx2(const double* v, std::size_t n, double x);
#endif
#if defined(CWMW_HAVE_NEON_BUILD)
CmpCounts count_lt_le_neon(const double* v, std::size_t n, double x);
#endif

} // namespace cwmw::kernels
