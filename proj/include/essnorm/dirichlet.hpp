#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "essnorm/bound_estimate.hpp"
#include "essnorm/exponents.hpp"
#include "essnorm/hardy.hpp"

// Dirichlet polynomials sum a_n n^{-s}, the coefficient-preserving lift to
// the polytorus determined by prime factorizations, H^p norms by lift
// quadrature / Parseval / ergodic averaging, and the multiplier essential
// norm formulas. Lift quadrature is limited to symbols built from the primes
// 2, 3, 5 (three torus variables).

namespace essnorm::dirichlet {

struct DirichletPolynomial {
    // coefficients[k] is a_{k+1}; trailing zeros trimmed
    std::vector<std::complex<double>> coefficients;

    std::size_t max_index() const { return coefficients.size(); }
    std::complex<double> coefficient(std::size_t n) const {  // 1-based
        return n >= 1 && n <= coefficients.size() ? coefficients[n - 1]
                                                  : std::complex<double>{0.0, 0.0};
    }
    void trim();
    std::complex<double> eval(std::complex<double> s) const;

    /// Text format: `n:coefficient` pairs, e.g. `1:1+0i, 2:2, 3:1`.
    static DirichletPolynomial parse(const std::string& text);
    std::string format() const;
};

struct BohrLiftResult {
    hardy::FrequencyPolynomial poly;
    int primes_used = 0;  // number of torus variables
};

/// Coefficient of z^{alpha(n)} is a_n where n = prod p_j^{alpha_j}. Rejects
/// indices with a prime factor beyond 5 (the three-variable truncation).
BohrLiftResult bohr_lift(const DirichletPolynomial& d);

/// Inverse transform; exact roundtrip.
DirichletPolynomial bohr_transform(const hardy::FrequencyPolynomial& poly);

/// Keep the coefficients a_n whose greatest prime divisor is <= the N-th
/// prime. Contraction in every H^p; idempotent.
DirichletPolynomial restrict_primes(const DirichletPolynomial& d, int N);

enum class NormMethod { lift_quadrature, parseval, ergodic };

struct ErgodicOptions {
    double half_width = 1e5;  // T
    double step = 0.01;
};

/// H^p norm of the polynomial: lift quadrature on the polytorus grid
/// (grid_per_axis points per variable), Parseval (p = 2 only), or the
/// time-average of |D(it)|^p over [-T, T].
double hp_norm_dirichlet(const DirichletPolynomial& d, double p, NormMethod method,
                         std::size_t grid_per_axis = 256,
                         const ErgodicOptions& ergodic = {});

/// Multiplier essential norm:
///   q < p finite -> exactly ||D||_r (lift quadrature), r = pq/(p-q)
///   p = q = 1    -> ||D||_inf as a grid sup of the lifted modulus (reported
///                   as a grid-limited lower approximation of the sup)
/// Rejects p < q (no bounded multipliers) and p = q > 1.
BoundEstimate multiplier_essnorm_dirichlet(const DirichletPolynomial& d,
                                           Exponent p, Exponent q,
                                           std::size_t grid_per_axis = 256);

/// The shifted-basis lower bound for ||M_D||_{e, inf->2}: picks 2^n > N,
/// forms M_D(2^{-ns}) (all coefficient frequencies exceed N), kills the
/// frequencies <= N, and returns the remaining 2-norm -- which equals
/// ||D||_2 exactly in coefficient arithmetic.
double essnorm_lower_infty2(const DirichletPolynomial& d, int N);

struct RangeClosure {
    double min_distance = 0.0;
    bool near_range = false;
    std::complex<double> argmin_s;
};

struct RangeGrid {
    double sigma_min = 0.1;
    double sigma_max = 4.0;
    double t_max = 50.0;
    std::size_t sigma_steps = 80;
    std::size_t t_steps = 2000;
};

/// Heuristic range test: min over a rectangular sample grid in
/// { Re s >= sigma_min } of |D(s) - lambda|. A grid minimum, not a proof.
RangeClosure range_closure_test(const DirichletPolynomial& d,
                                std::complex<double> lambda,
                                const RangeGrid& grid = {},
                                double near_tolerance = 1e-2);

}  // namespace essnorm::dirichlet
