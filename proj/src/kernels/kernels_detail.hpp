#pragma once

#include <cmath>
#include <cstddef>

// Shared per-element helpers so scalar and SIMD backends implement the same
// arithmetic, differing only in how lanes are batched.

namespace essnorm::kern::detail {

// p is treated as a small nonnegative integer exponent when it is integral
// and within [0, max_int_pow]. Binary powering keeps backends consistent.
inline constexpr int max_int_pow = 24;

inline bool small_int_exponent(double p, int& out) {
    if (!(p >= 0.0) || p > static_cast<double>(max_int_pow)) return false;
    const double r = std::nearbyint(p);
    if (r != p) return false;
    out = static_cast<int>(r);
    return true;
}

inline double pow_int(double x, int k) {
    double acc = 1.0;
    double base = x;
    while (k > 0) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

struct ScalarBackendTable;  // forward; defined in kernels.cpp

}  // namespace essnorm::kern::detail

namespace essnorm::kern {

// One function-pointer table per backend.
struct BackendTable {
    double (*reduce_sum)(const double*, std::size_t);
    double (*reduce_max)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*pow_sum)(const double*, std::size_t, double);
    double (*weighted_pow_sum)(const double*, const double*, std::size_t, double);
    void (*abs_sq)(const std::complex<double>*, double*, std::size_t);
    double (*weighted_abs_pow_sum)(const std::complex<double>*, const double*,
                                   std::size_t, double);
};

const BackendTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const BackendTable& avx2_table();
#endif

}  // namespace essnorm::kern
