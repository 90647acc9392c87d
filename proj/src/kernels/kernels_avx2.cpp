// AVX2 backend. Compiled with -mavx2 and selected at runtime only when the
// CPU reports the feature; every routine must match the scalar reference in
// kernels.cpp up to summation order.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "essnorm/kernels.hpp"
#include "kernels_detail.hpp"

namespace essnorm::kern {

namespace {

using detail::pow_int;
using detail::small_int_exponent;

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

inline __m256d pow_int_vec(__m256d x, int k) {
    __m256d acc = _mm256_set1_pd(1.0);
    __m256d base = x;
    while (k > 0) {
        if (k & 1) acc = _mm256_mul_pd(acc, base);
        base = _mm256_mul_pd(base, base);
        k >>= 1;
    }
    return acc;
}

double avx2_reduce_sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double avx2_reduce_max(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

double avx2_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double avx2_weighted_pow_sum(const double* x, const double* w, std::size_t n,
                             double p) {
    int k;
    if (!small_int_exponent(p, k))
        return scalar_table().weighted_pow_sum(x, w, n, p);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = pow_int_vec(_mm256_loadu_pd(x + i), k);
        if (w) v = _mm256_mul_pd(v, _mm256_loadu_pd(w + i));
        acc = _mm256_add_pd(acc, v);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double v = pow_int(x[i], k);
        s += w ? w[i] * v : v;
    }
    return s;
}

double avx2_pow_sum(const double* x, std::size_t n, double p) {
    return avx2_weighted_pow_sum(x, nullptr, n, p);
}

// |z|^2 for 4 interleaved complex values: two loads, lane-wise square, then
// pairwise adds. hadd interleaves 128-bit lanes, so results come out in the
// order z0 z1 z2 z3 after one permute.
inline __m256d modsq4(const double* zs) {
    __m256d a = _mm256_loadu_pd(zs);      // r0 i0 r1 i1
    __m256d b = _mm256_loadu_pd(zs + 4);  // r2 i2 r3 i3
    a = _mm256_mul_pd(a, a);
    b = _mm256_mul_pd(b, b);
    __m256d h = _mm256_hadd_pd(a, b);  // |z0|^2 |z2|^2 |z1|^2 |z3|^2
    return _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
}

void avx2_abs_sq(const std::complex<double>* z, double* out, std::size_t n) {
    const double* zs = reinterpret_cast<const double*>(z);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, modsq4(zs + 2 * i));
    for (; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        out[i] = re * re + im * im;
    }
}

double avx2_weighted_abs_pow_sum(const std::complex<double>* z, const double* w,
                                 std::size_t n, double p) {
    int k;
    const bool even = small_int_exponent(p / 2.0, k);
    const bool odd = !even && small_int_exponent(p, k);
    if (!even && !odd) return scalar_table().weighted_abs_pow_sum(z, w, n, p);

    const double* zs = reinterpret_cast<const double*>(z);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d m = modsq4(zs + 2 * i);
        __m256d v = even ? pow_int_vec(m, k) : pow_int_vec(_mm256_sqrt_pd(m), k);
        if (w) v = _mm256_mul_pd(v, _mm256_loadu_pd(w + i));
        acc = _mm256_add_pd(acc, v);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        const double m = re * re + im * im;
        const double v = even ? pow_int(m, k) : pow_int(std::sqrt(m), k);
        s += w ? w[i] * v : v;
    }
    return s;
}

}  // namespace

const BackendTable& avx2_table() {
    static const BackendTable t{avx2_reduce_sum,       avx2_reduce_max,
                                avx2_dot,              avx2_pow_sum,
                                avx2_weighted_pow_sum, avx2_abs_sq,
                                avx2_weighted_abs_pow_sum};
    return t;
}

}  // namespace essnorm::kern

#endif  // x86_64
