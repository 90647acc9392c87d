#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "essnorm/exponents.hpp"

// Functions on the circle and the polytorus T^N (N <= 3): H^p norms, outer
// functions with prescribed boundary modulus, the Hoelder extremizer that
// realizes sup { integral F |g|^q : ||g||_p <= 1 } constructively, Fejer
// (Cesaro) smoothing, and the analytic witness constructions used by the
// multiplier lower bounds.

namespace essnorm::hardy {

/// Complex values on a row-major product grid of 2^m points per axis.
struct CircleGridFunction {
    std::vector<std::size_t> dims;  // per-axis sizes, each a power of two
    std::vector<std::complex<double>> values;

    std::size_t total() const;
    int axes() const { return static_cast<int>(dims.size()); }
    double theta(int axis, std::size_t j) const;

    static CircleGridFunction constant(std::vector<std::size_t> dims,
                                       std::complex<double> c);
    /// Sample f(theta_0, ..., theta_{N-1}) over the grid.
    static CircleGridFunction sample(
        std::vector<std::size_t> dims,
        const std::function<std::complex<double>(const std::vector<double>&)>& f);

    void check_compatible(const CircleGridFunction& other) const;
};

/// Finitely supported Fourier coefficients on Z^N (unused axes frozen at 0).
struct FrequencyPolynomial {
    int axes = 1;
    std::map<std::array<int, 3>, std::complex<double>> coeffs;

    bool analytic() const;  // all frequencies componentwise >= 0
    int min_frequency(int axis) const;
    int max_frequency(int axis) const;
    FrequencyPolynomial shifted(const std::array<int, 3>& delta) const;
    std::complex<double> eval_at(const std::vector<double>& thetas) const;
    /// Exact grid evaluation (frequencies wrap mod the grid size, which agrees
    /// with the true values at grid nodes).
    CircleGridFunction evaluate(const std::vector<std::size_t>& dims) const;
    /// Parseval norm sqrt(sum |c|^2).
    double l2_norm() const;
};

/// ((1/grid) sum |f|^p)^(1/p); max modulus for p = inf.
double hp_norm(const CircleGridFunction& f, Exponent p);

/// Normalized Fourier coefficients of f (one FFT); coefficient of frequency k
/// is at array index k mod n per axis.
std::vector<std::complex<double>> fourier_coefficients(const CircleGridFunction& f);

/// Fraction of spectral energy at negative frequencies (any axis); the
/// analyticity defect of a grid function.
double analytic_residual(const CircleGridFunction& f);

struct OuterResult {
    CircleGridFunction g;
    double modulus_error = 0.0;     // max | |g| - clamp(G) |
    double analytic_residual = 0.0; // negative-frequency energy fraction
    bool clamped = false;           // some value was below the 1e-8 floor
};

/// Outer function with boundary modulus G > 0 (1-axis grids):
/// g = exp(log G + i H(log G)) with H the conjugate-function multiplier.
/// Values below 1e-8 are clamped; non-finite values are rejected.
OuterResult outer_with_modulus(const CircleGridFunction& G);

struct ExtremizerResult {
    CircleGridFunction G;  // >= 0, ||G||_{s*} = 1
    double value = 0.0;    // integral F G = ||F||_s
};

/// G proportional to F^(s-1), normalized so ||G||_{s*} = 1; then
/// integral(F G) = ||F||_s. F identically 0 returns G = 1 with value 0.
ExtremizerResult holder_extremizer(const CircleGridFunction& F, double s);

struct SupRealization {
    CircleGridFunction g;  // analytic, ||g||_p = 1
    double value = 0.0;    // integral F |g|^q = ||F||_s
    double g_norm_p = 0.0;
    bool clamped = false;
};

/// Constructive realization of ||F||_s = sup { integral F|g|^q : ||g||_p=1 }
/// for p > q: g is the outer function with |g| = G^(1/q), G the extremizer.
SupRealization superinner_sup_realize(const CircleGridFunction& F,
                                      const ExponentQuad& quad);

/// Cesaro mean of degree K (per axis): coefficients damped by
/// prod_a (1 - |k_a|/(K+1)). Requires 1 <= K < dim/2 on every axis; then the
/// result is the circular convolution with the sampled Fejer kernel, so it
/// preserves nonnegativity, sup bounds, and the mean.
FrequencyPolynomial fejer_approx(const CircleGridFunction& f, int degree);

struct ShiftWitness {
    FrequencyPolynomial E;  // z_1^k * P_n * Q_n, analytic
    double ratio = 0.0;     // ||F E||_q / ||E||_p -> ||F||_r
    int monomial_shift = 0; // the exponent d in P_n
};

/// The analytic witness of the multiplier lower bound: Q_n is the Fejer
/// approximation of G = |F|^t, P_n the smallest monomial making P_n Q_n
/// analytic, E = z_1^shift P_n Q_n. The returned ratio is invariant in shift
/// and converges to ||F||_r as the Fejer degree grows.
ShiftWitness analytic_shift_witness(const CircleGridFunction& F,
                                    const ExponentQuad& quad, int fejer_degree,
                                    int shift);

struct FactReport {
    struct Pair {
        int n = 0, m = 0;       // indices with m > n
        double inside = 0.0;    // integral_{A_n} |R_n - R_m|
        double outside = 0.0;   // integral over the complement
    };
    std::vector<Pair> pairs;
    double inside_bound = 0.125;  // required: inside >= 1/8
    double outside_bound = 0.0;   // required: outside < 4 eps
    std::vector<double> l1_norms;
    std::vector<double> sup_values;     // max |R_n|
    std::vector<double> sup_bounds;     // 1/mu(A_n)
    bool pass = false;
};

struct PeakingResult {
    std::vector<CircleGridFunction> R;  // analytic peaking polynomials
    std::vector<double> level_masses;   // mu(A_n)
    std::vector<int> degrees;           // Fejer degree chosen per level
    FactReport report;
};

/// Peaking sequence on the superlevel set { |F| >= ||F||_inf - eps }: nested
/// A_n with mu(A_{n+1}) <= mu(A_n)/4, Fejer-smoothed normalized indicators
/// with a grid Egorov selection (deviation > eps only on mass <= eps mu(A_n)),
/// made analytic by a monomial factor. Throws std::runtime_error with a
/// diagnostic if the superlevel set cannot nest `count` levels or no Fejer
/// degree passes the Egorov criterion.
PeakingResult peaking_sequence(const CircleGridFunction& F, double eps, int count);

/// Function spec mini-language: `const <c>`, `poly: c0,c1,...` or
/// `poly: (k1[,k2[,k3]])=c; ...`, `abs-of-poly: ...`, `csv:<path>`.
CircleGridFunction parse_circle_function(const std::string& spec,
                                         const std::vector<std::size_t>& dims);

/// Same language, as a callable on T^1 (csv specs use nearest-node lookup).
std::function<std::complex<double>(double)> parse_boundary_function(
    const std::string& spec);

}  // namespace essnorm::hardy
