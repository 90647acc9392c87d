#pragma once

#include <complex>
#include <cstddef>

// Runtime-dispatched arithmetic reductions used by the norm and quadrature
// inner loops. The scalar backend defines the reference semantics; SIMD
// backends must agree with it to ~1e-13 relative accuracy (they may
// reassociate sums). The backend is chosen once from CPU features and can be
// overridden for testing.

namespace essnorm::kern {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);
Backend active_backend();

/// Override the auto-detected backend. Throws std::invalid_argument if the
/// requested backend is not available on this machine.
void force_backend(Backend b);
void reset_backend();

/// Sum of x[0..n). Vectorized reduction; not compensated.
double reduce_sum(const double* x, std::size_t n);

/// Max of x[0..n); 0 for n == 0.
double reduce_max(const double* x, std::size_t n);

/// Dot product sum x[i]*y[i].
double dot(const double* x, const double* y, std::size_t n);

/// Sum x[i]^p for x[i] >= 0. Integer p up to 24 uses binary powering on both
/// backends; other exponents fall back to std::pow per element.
double pow_sum(const double* x, std::size_t n, double p);

/// Sum w[i]*x[i]^p for x[i] >= 0; w may be null (treated as 1).
double weighted_pow_sum(const double* x, const double* w, std::size_t n, double p);

/// out[i] = |z[i]|^2.
void abs_sq(const std::complex<double>* z, double* out, std::size_t n);

/// Sum w[i]*|z[i]|^p; w may be null. Even p stays on the squared modulus,
/// odd integer p takes one sqrt, other p falls back to std::pow.
double weighted_abs_pow_sum(const std::complex<double>* z, const double* w,
                            std::size_t n, double p);

/// Compensated (Neumaier) sum of x[0..n). Always scalar; used where signed
/// cancellation must be resolved to machine precision regardless of backend.
double compensated_sum(const double* x, std::size_t n);

}  // namespace essnorm::kern
