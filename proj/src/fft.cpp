#include "essnorm/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace essnorm::fft {

namespace {

void bit_reverse(std::complex<double>* a, std::size_t n) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
}

}  // namespace

void transform(std::complex<double>* a, std::size_t n, bool inverse) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft length must be a power of two");
    if (n == 1) return;
    bit_reverse(a, n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wn(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wn;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) a[i] *= inv;
    }
}

void transform_nd(std::vector<std::complex<double>>& a,
                  const std::vector<std::size_t>& dims, bool inverse) {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    if (a.size() != total) throw std::invalid_argument("fft array/dims mismatch");

    // Transform along each axis. stride is the distance between consecutive
    // elements of that axis in the row-major layout.
    std::vector<std::complex<double>> line;
    std::size_t stride = total;
    for (std::size_t axis = 0; axis < dims.size(); ++axis) {
        const std::size_t n = dims[axis];
        stride /= n;
        line.resize(n);
        const std::size_t block = n * stride;  // span of one axis run
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (std::size_t k = 0; k < n; ++k) line[k] = a[base + off + k * stride];
                transform(line.data(), n, inverse);
                for (std::size_t k = 0; k < n; ++k) a[base + off + k * stride] = line[k];
            }
        }
    }
}

}  // namespace essnorm::fft
