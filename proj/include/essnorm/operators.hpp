#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "essnorm/bound_estimate.hpp"
#include "essnorm/boundary_maps.hpp"
#include "essnorm/exponents.hpp"
#include "essnorm/hardy.hpp"
#include "essnorm/measure.hpp"

// Operator-level formulas: exact multiplier norms, the essential-norm
// formulas for multipliers, inclusion operators and weighted compositions,
// the limsup/liminf bound engines, and a duality-ascent oracle for finite
// L^p -> L^q matrix norms. limsup and liminf are realized honestly as
// max/min over a declared finite index window; no extrapolation.

namespace essnorm::ops {

/// mu = interior point masses + boundary density F d(sigma).
struct CarlesonMeasure {
    struct PointMass {
        std::complex<double> z;  // |z| < 1
        double mass = 0.0;
    };
    std::vector<PointMass> interior;
    hardy::CircleGridFunction boundary_density;  // real, >= 0
};

/// Exact operator norm of M_u : L^p -> L^q for p > q: ||u||_r.
double multiplier_norm_exact(const measure::GridFunction& u,
                             const ExponentQuad& quad,
                             const measure::MeasureSpace& space);

/// Essential norm of M_u : L^p -> L^q, p > q:
///   p finite          -> exactly ||u restricted to the diffuse part||_r
///   p = inf, q = 2    -> exactly ||u_d||_2
///   p = inf, q != 2   -> bracket [ (1/2)||u_d||_q , ||u_d||_q ]
BoundEstimate multiplier_essnorm(const measure::GridFunction& u,
                                 const ExponentQuad& quad,
                                 const measure::MeasureSpace& space);

struct TailWindow {
    std::size_t start = 0;
    std::size_t count = 0;  // 0 = to the end
};

/// The families of compact approximants Q_n (and remainders R_n = I - Q_n)
/// the bound engines are driven with, plus their recorded norm bounds.
struct ProjectionSequence {
    enum class Kind {
        dilation,                 // f -> f((1 - 1/n) . )
        coefficient_truncation,   // keep frequencies <= n
        conditional_expectation,  // dyadic level-n averages
        atom_truncation,          // keep the first n atoms
    };
    Kind kind = Kind::atom_truncation;
    int n_begin = 1;
    int n_end = 1;

    /// ||Q_n||: every kind here is a contraction.
    double projection_norm_bound() const { return 1.0; }
    /// lambda with ||I - Q_n|| <= lambda; 1 for orthogonal conditional
    /// expectations at q = 2 would be sharper, 2 is always safe.
    double remainder_norm_bound() const { return 2.0; }
};

/// Engine variants driven by a declared projection family; the window and
/// lambda come from the sequence itself.
double bound_engine_lower(const std::function<double(int)>& oracle,
                          const ProjectionSequence& seq);
double bound_engine_upper(const std::function<double(int)>& oracle,
                          const ProjectionSequence& seq);

struct SmallPResult {
    BoundEstimate estimate;
    std::vector<double> tail_norms;  // ||T_n|| = sup_{k>=n} |u_k| mu_k^{1/q-1/p}
    std::size_t window_start = 0;
};

/// p < q on a purely atomic space: essential norm = limsup-style max over the
/// declared tail window of |u(A_n)| mu(A_n)^{1/q - 1/p} (the signed-reciprocal
/// convention; this is the quantity whose sup characterizes boundedness).
SmallPResult multiplier_essnorm_smallp(const measure::GridFunction& u,
                                       const ExponentQuad& quad,
                                       const measure::MeasureSpace& space,
                                       TailWindow window);

/// (1/lambda) * max over the window of the oracle values ||R_n T||; a
/// certified lower bound for ||T||_e when ||R_n|| <= lambda and R_n -> 0
/// pointwise.
double bound_engine_lower(const std::function<double(int)>& oracle, int n_begin,
                          int n_end, double lambda);

/// min over the window of ||T (I - Q_n)||; an upper bound for ||T||_e when
/// every Q_n is compact.
double bound_engine_upper(const std::function<double(int)>& oracle, int n_begin,
                          int n_end);

/// Interior Carleson functional at boundary angle xi (disc case):
/// sum of mass/(1-|z|^2) over interior points with |1 - z conj(xi)| <= 1-|z|^2.
double carleson_hat(const CarlesonMeasure& mu, double xi_angle);

/// Essential norm of the inclusion J_mu : H^p -> L^q(mu), p > q: the interior
/// part is compact and contributes 0; the value is ||F||_s^{1/q} for the
/// boundary density F.
BoundEstimate inclusion_essnorm(const CarlesonMeasure& mu, const ExponentQuad& quad);

/// Rigorous upper oracle for ||J_mu (I - Q_n)|| with the dilation projections
/// Q_n f = f((1-1/n) .) on an interior-only measure, via the H^p derivative
/// growth bound. Feed to bound_engine_upper.
double dilation_remainder_bound(const CarlesonMeasure& mu, const ExponentQuad& quad,
                                int n);

struct ChangeOfVarResult {
    double lhs = 0.0;  // MC integral of |f  o  phi*|^q over the contact set
    double rhs = 0.0;  // quadrature of |f|^q F dsigma
    double gap = 0.0;
    double contact_fraction = 0.0;
    bool low_contact_warning = false;
};

ChangeOfVarResult change_of_variables_check(
    const disc::AnalyticSelfMap& phi,
    const std::function<std::complex<double>(double)>& f, double q,
    std::size_t samples, std::uint64_t seed,
    const disc::PushforwardDensity& density);

/// Realizes ||M_E C_phi||_{p->q}: builds the extremal g for F_phi, Monte
/// Carlo evaluates integral_E |g o phi*|^q dsigma, and returns its q-th root
/// (which agrees with ||F_phi||_s^{1/q}).
struct MeCphiResult {
    double value = 0.0;        // ( MC integral )^{1/q}
    double expected = 0.0;     // ||F||_s^{1/q}
    double rel_gap = 0.0;
};
MeCphiResult me_cphi_norm(const disc::BlaschkeProduct& b, const ExponentQuad& quad,
                          std::size_t bins, std::size_t samples,
                          std::uint64_t seed);

/// A measurable map between discrete measure spaces: every source atom/cell
/// is sent wholly to one target atom/cell.
struct GridMap {
    struct Target {
        bool is_atom = false;
        std::size_t index = 0;
    };
    std::vector<Target> atom_targets;  // one per source atom
    std::vector<Target> cell_targets;  // one per source cell

    /// target = source, both parts.
    static GridMap identity(const measure::MeasureSpace& space);
    /// x -> 2x mod 1 between a source grid of 2^(m+1) cells and a target grid
    /// of 2^m cells (cell k -> cell k mod 2^m, exact for the doubling map).
    static GridMap doubling(const measure::MeasureSpace& source,
                            const measure::MeasureSpace& target);
};

/// F_{q,u,phi} = (d mu_q / d mu)^{1/q} on the target space by exact binning:
/// mu_q(b) = sum over source elements e mapping to b of |u(e)|^q nu(e).
/// Throws (naming the offending cells) if a positive-mass source element maps
/// to a zero-mass target element.
measure::GridFunction weighted_pushforward_lebesgue(
    const GridMap& phi, const measure::GridFunction& u, double q,
    const measure::MeasureSpace& source, const measure::MeasureSpace& target);

/// Essential norm of the weighted composition f -> u (f o phi) for p > q:
/// || F_{q,u,phi} restricted to the target diffuse part ||_r.
BoundEstimate wco_essnorm(const GridMap& phi, const measure::GridFunction& u,
                          const ExponentQuad& quad,
                          const measure::MeasureSpace& source,
                          const measure::MeasureSpace& target);

/// Dense real matrix acting from L^p(weights w_src) to L^q(weights w_dst):
/// (K x)_j = sum_i K(j,i) w_src(i) x(i).
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;  // row-major
    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

struct AscentOptions {
    int max_iters = 500;
    double tol = 1e-13;
    int starts = 8;
    std::uint64_t seed = 1;
};

struct AscentResult {
    double lower_bound = 0.0;  // always a valid lower bound for ||K||_{p->q}
    bool converged = false;
    std::vector<double> history;  // best value after each start
};

/// Alternating duality-map ascent for ||K||_{p->q} (finite p, q >= 1): every
/// iterate's ratio ||Kx||_q / ||x||_p is a certified lower bound; multi-start
/// maximum is returned. Reliable on nonnegative or diagonal kernels.
AscentResult operator_norm_ascent(const Matrix& K, const ExponentQuad& quad,
                                  const std::vector<double>& w_src,
                                  const std::vector<double>& w_dst,
                                  const AscentOptions& opt = {});

/// ||M_u - M_{u_N}||_{p->q} = ||u restricted to atoms > N and the diffuse
/// part||_r; the compact-subtraction identity used against multiplier_essnorm.
double compact_subtraction_norm(const measure::GridFunction& u,
                                const ExponentQuad& quad,
                                const measure::MeasureSpace& space, std::size_t N);

}  // namespace essnorm::ops
