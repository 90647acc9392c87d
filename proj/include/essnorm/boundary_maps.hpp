#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "essnorm/bound_estimate.hpp"
#include "essnorm/exponents.hpp"

// Holomorphic self-maps of the unit disc: boundary traces, contact sets, and
// the pushforward densities of boundary measure under the boundary trace.
// Inner symbols built from Blaschke factors get an exact analytic density via
// the lifted boundary angle function; everything else goes through seeded,
// stratified Monte Carlo.

namespace essnorm::disc {

/// Finite Blaschke product eta * prod (z - a_j)/(1 - conj(a_j) z).
struct BlaschkeProduct {
    std::vector<std::complex<double>> zeros;   // |a_j| < 1
    std::complex<double> rotation{1.0, 0.0};   // |eta| = 1

    BlaschkeProduct() = default;
    BlaschkeProduct(std::vector<std::complex<double>> zs,
                    std::complex<double> rot = {1.0, 0.0});

    int degree() const { return static_cast<int>(zeros.size()); }
    std::complex<double> eval(std::complex<double> z) const;

    /// Lifted boundary angle: phi*(e^{i theta}) = e^{i tau(theta)}, with tau
    /// continuous, strictly increasing, tau(theta + 2pi) = tau(theta) + 2pi k.
    double tau(double theta) const;
    /// tau'(theta) = sum_j (1-|a_j|^2)/|e^{i theta} - a_j|^2 > 0.
    double tau_prime(double theta) const;
    /// Monotone inverse on the full lift; Newton with bisection safeguard.
    double tau_inverse(double target) const;
};

class AnalyticSelfMap {
public:
    struct Taylor {
        std::vector<std::complex<double>> coefficients;
        double tail_bound = 0.0;
    };

    static AnalyticSelfMap blaschke(BlaschkeProduct b);
    static AnalyticSelfMap taylor(Taylor t);
    static AnalyticSelfMap composition(std::vector<AnalyticSelfMap> maps);

    /// Map spec mini-language: `blaschke: a1,a2,...[;rot=eta]`,
    /// `taylor: c0,c1,...`, `compose: <map>|<map>`. Composed maps apply left
    /// to right: z -> m_last(... m_1(z)).
    static AnalyticSelfMap parse(const std::string& spec);

    std::complex<double> eval(std::complex<double> z) const;

    /// sup |phi| <= 1 checked numerically on a radius/angle test grid;
    /// false if violated beyond 1e-9.
    bool self_map_check() const;

    const BlaschkeProduct* as_blaschke() const;
    std::string describe() const;

private:
    AnalyticSelfMap() = default;
    std::variant<BlaschkeProduct, Taylor, std::vector<AnalyticSelfMap>> impl_;
};

struct TraceResult {
    std::complex<double> value;
    bool converged = false;
};

/// phi(r_j e^{i xi}) along r_j = 1 - 2^-j, j <= max_j; converged when the
/// last three evaluations agree to 1e-6.
TraceResult boundary_trace(const AnalyticSelfMap& phi, double xi_angle,
                           int max_j = 20);

/// Pushforward density of normalized boundary measure under the boundary
/// trace, restricted to the contact set, on 2^b uniform angular bins.
struct PushforwardDensity {
    std::vector<double> values;  // nonnegative, piecewise-constant density
    enum class Provenance { analytic, monte_carlo } provenance =
        Provenance::analytic;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    double contact_fraction = 1.0;
    bool low_contact_warning = false;

    std::size_t bins() const { return values.size(); }
    /// integral of the density against normalized measure = pushforward mass.
    double mass() const;
    /// L^s norm against normalized measure.
    double ls_norm(double s) const;
};

/// Exact density for an inner symbol: per target bin, the total preimage arc
/// length under the k sheets of tau, divided by the bin width.
PushforwardDensity pushforward_density_blaschke(const BlaschkeProduct& b,
                                                std::size_t bins);

/// Stratified seeded sampling of arg phi*(xi) over the contact set
/// { |trace| > 1 - delta }, each sample weighted |u(xi)|^q (u = 1 if null).
/// Deterministic given (seed, shards). Warns when the contact set captures
/// fewer than 1% of samples.
PushforwardDensity pushforward_density_mc(
    const AnalyticSelfMap& phi,
    const std::function<std::complex<double>(double)>* weight, double q,
    std::size_t samples, std::size_t bins, std::uint64_t seed,
    double delta = 1e-3, unsigned shards = 1);

struct ContactSetEstimate {
    std::vector<double> indicator;  // per source bin, fraction in contact
    double measure = 0.0;
    double confidence_radius = 0.0;
};

ContactSetEstimate estimate_contact_set(const AnalyticSelfMap& phi,
                                        std::size_t samples, std::size_t bins,
                                        std::uint64_t seed, double delta = 1e-3);

/// Composition-operator essential norm bracket from the pushforward density:
/// lower = ||F||_s^{1/q}, upper = lower for q = 2 and 2 * lower otherwise.
BoundEstimate essnorm_composition(const PushforwardDensity& F,
                                  const ExponentQuad& quad);

}  // namespace essnorm::disc
