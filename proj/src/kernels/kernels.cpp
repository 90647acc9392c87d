#include "essnorm/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels_detail.hpp"

namespace essnorm::kern {

namespace {

using detail::pow_int;
using detail::small_int_exponent;

double scalar_reduce_sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double scalar_reduce_max(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

double scalar_dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double scalar_weighted_pow_sum(const double* x, const double* w, std::size_t n,
                               double p) {
    double s = 0.0;
    int k;
    if (small_int_exponent(p, k)) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = pow_int(x[i], k);
            s += w ? w[i] * v : v;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::pow(x[i], p);
            s += w ? w[i] * v : v;
        }
    }
    return s;
}

double scalar_pow_sum(const double* x, std::size_t n, double p) {
    return scalar_weighted_pow_sum(x, nullptr, n, p);
}

void scalar_abs_sq(const std::complex<double>* z, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        out[i] = re * re + im * im;
    }
}

double scalar_weighted_abs_pow_sum(const std::complex<double>* z, const double* w,
                                   std::size_t n, double p) {
    double s = 0.0;
    int k;
    if (small_int_exponent(p / 2.0, k)) {
        // even p: stay on |z|^2
        for (std::size_t i = 0; i < n; ++i) {
            const double re = z[i].real(), im = z[i].imag();
            const double v = pow_int(re * re + im * im, k);
            s += w ? w[i] * v : v;
        }
    } else if (small_int_exponent(p, k)) {
        for (std::size_t i = 0; i < n; ++i) {
            const double re = z[i].real(), im = z[i].imag();
            const double v = pow_int(std::sqrt(re * re + im * im), k);
            s += w ? w[i] * v : v;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double re = z[i].real(), im = z[i].imag();
            const double v = std::pow(re * re + im * im, 0.5 * p);
            s += w ? w[i] * v : v;
        }
    }
    return s;
}

const BackendTable* g_active = nullptr;
bool g_forced = false;

const BackendTable* detect() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return &avx2_table();
#endif
    return &scalar_table();
}

const BackendTable* table() {
    if (!g_active) g_active = detect();
    return g_active;
}

}  // namespace

const BackendTable& scalar_table() {
    static const BackendTable t{scalar_reduce_sum,       scalar_reduce_max,
                                scalar_dot,              scalar_pow_sum,
                                scalar_weighted_pow_sum, scalar_abs_sq,
                                scalar_weighted_abs_pow_sum};
    return t;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

bool backend_available(Backend b) {
    if (b == Backend::scalar) return true;
#if defined(__x86_64__) || defined(_M_X64)
    if (b == Backend::avx2) return __builtin_cpu_supports("avx2") != 0;
#endif
    return false;
}

Backend active_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    if (table() == &avx2_table()) return Backend::avx2;
#endif
    return Backend::scalar;
}

void force_backend(Backend b) {
    if (!backend_available(b))
        throw std::invalid_argument(std::string("kernel backend unavailable: ") +
                                    backend_name(b));
    if (b == Backend::scalar) {
        g_active = &scalar_table();
    }
#if defined(__x86_64__) || defined(_M_X64)
    else if (b == Backend::avx2) {
        g_active = &avx2_table();
    }
#endif
    g_forced = true;
}

void reset_backend() {
    g_active = detect();
    g_forced = false;
}

double reduce_sum(const double* x, std::size_t n) { return table()->reduce_sum(x, n); }
double reduce_max(const double* x, std::size_t n) { return table()->reduce_max(x, n); }
double dot(const double* x, const double* y, std::size_t n) {
    return table()->dot(x, y, n);
}
double pow_sum(const double* x, std::size_t n, double p) {
    return table()->pow_sum(x, n, p);
}
double weighted_pow_sum(const double* x, const double* w, std::size_t n, double p) {
    return table()->weighted_pow_sum(x, w, n, p);
}
void abs_sq(const std::complex<double>* z, double* out, std::size_t n) {
    table()->abs_sq(z, out, n);
}
double weighted_abs_pow_sum(const std::complex<double>* z, const double* w,
                            std::size_t n, double p) {
    return table()->weighted_abs_pow_sum(z, w, n, p);
}

double compensated_sum(const double* x, std::size_t n) {
    // Neumaier variant of Kahan summation.
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = sum + x[i];
        if (std::abs(sum) >= std::abs(x[i]))
            comp += (sum - t) + x[i];
        else
            comp += (x[i] - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace essnorm::kern
