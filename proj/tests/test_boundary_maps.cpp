#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "essnorm/boundary_maps.hpp"

using namespace essnorm;
using namespace essnorm::disc;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("map spec parsing and evaluation") {
    const auto b = AnalyticSelfMap::parse("blaschke: 0.5");
    CHECK(b.as_blaschke() != nullptr);
    // (z - 0.5)/(1 - 0.5 z) at z = 0 is -0.5
    CHECK(std::abs(b.eval(0.0) - std::complex<double>(-0.5, 0.0)) < 1e-14);

    const auto t = AnalyticSelfMap::parse("taylor: 0.5, 0.5");
    CHECK(std::abs(t.eval({0.0, 0.0}) - std::complex<double>(0.5, 0.0)) < 1e-14);
    CHECK(t.self_map_check());

    const auto comp = AnalyticSelfMap::parse("compose: taylor:0,0,1 | blaschke:0.5");
    // z^2 first, then the Blaschke factor
    const std::complex<double> z{0.3, 0.1};
    const auto inner = z * z;
    CHECK(std::abs(comp.eval(z) - (inner - 0.5) / (1.0 - 0.5 * inner)) < 1e-14);

    CHECK(!AnalyticSelfMap::parse("taylor: 0, 2").self_map_check());
    CHECK_THROWS_AS(AnalyticSelfMap::parse("blaschke: 1.5"), std::invalid_argument);
    CHECK_THROWS_AS(AnalyticSelfMap::parse("gibberish"), std::invalid_argument);
}

TEST_CASE("boundary traces") {
    SUBCASE("z^3 has trace e^{3 i theta}") {
        const auto phi = AnalyticSelfMap::parse("taylor: 0,0,0,1");
        for (double th : {0.3, 1.7, 4.0}) {
            const auto tr = boundary_trace(phi, th);
            CHECK(tr.converged);
            CHECK(std::abs(tr.value - std::polar(1.0, 3.0 * th)) < 1e-5);
        }
    }
    SUBCASE("(1+z)/2 extends continuously to 0 at xi = -1") {
        const auto phi = AnalyticSelfMap::parse("taylor: 0.5, 0.5");
        const auto tr = boundary_trace(phi, std::numbers::pi);
        CHECK(tr.converged);
        CHECK(std::abs(tr.value) < 1e-5);
    }
    SUBCASE("Blaschke factor trace at xi = 1 is the closed form") {
        const auto phi = AnalyticSelfMap::parse("blaschke: 0.5");
        const auto tr = boundary_trace(phi, 0.0);
        // (1 - 0.5)/(1 - 0.5) = 1
        CHECK(std::abs(tr.value - 1.0) < 1e-5);
    }
}

TEST_CASE("boundary speed of Blaschke products") {
    SUBCASE("z^k has constant speed k") {
        const BlaschkeProduct b(std::vector<std::complex<double>>(3, {0.0, 0.0}));
        for (double th : {0.0, 1.0, 2.5})
            CHECK(b.tau_prime(th) == doctest::Approx(3.0));
    }
    SUBCASE("single zero at 0.5: speed 3 at theta = 0") {
        const BlaschkeProduct b(std::vector<std::complex<double>>{{0.5, 0.0}});
        CHECK(b.tau_prime(0.0) == doctest::Approx(3.0));
    }
    SUBCASE("mean speed equals the degree") {
        const BlaschkeProduct b(
            std::vector<std::complex<double>>{{0.5, 0.0}, {-0.2, 0.3}, {0.0, -0.7}});
        const int n = 1 << 16;
        double mean = 0.0;
        for (int j = 0; j < n; ++j) mean += b.tau_prime(kTwoPi * j / n);
        CHECK(mean / n == doctest::Approx(3.0).epsilon(1e-8));
    }
    SUBCASE("lifted angle is strictly increasing with total increase 2 pi k") {
        const BlaschkeProduct b(
            std::vector<std::complex<double>>{{0.5, 0.0}, {-0.2, 0.3}});
        const int n = 4096;
        double prev = b.tau(0.0);
        for (int j = 1; j <= n; ++j) {
            const double t = b.tau(kTwoPi * j / n);
            CHECK(t > prev);
            prev = t;
        }
        CHECK(prev - b.tau(0.0) == doctest::Approx(2.0 * kTwoPi));
    }
}

TEST_CASE("analytic pushforward densities") {
    SUBCASE("z^k pushes forward to the constant density") {
        for (int k : {1, 2, 5}) {
            const BlaschkeProduct b(
                std::vector<std::complex<double>>(static_cast<std::size_t>(k),
                                                  {0.0, 0.0}));
            const auto F = pushforward_density_blaschke(b, 1024);
            for (double v : F.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(F.mass() == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("single zero 0.5: spot value at w = 1 is 1/tau'(0) = 1/3") {
        const BlaschkeProduct b(std::vector<std::complex<double>>{{0.5, 0.0}});
        const auto F = pushforward_density_blaschke(b, 4096);
        CHECK(F.values[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-2));
        CHECK(F.mass() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("mass 1 for products of up to 5 factors") {
        const BlaschkeProduct b(std::vector<std::complex<double>>{
            {0.5, 0.0}, {-0.2, 0.3}, {0.0, -0.7}, {0.1, 0.1}, {0.85, 0.0}});
        const auto F = pushforward_density_blaschke(b, 2048);
        CHECK(F.mass() == doctest::Approx(1.0).epsilon(1e-6));
        for (double v : F.values) CHECK(v >= 0.0);
    }
    SUBCASE("near-boundary zeros keep the inversion well conditioned") {
        const BlaschkeProduct b(std::vector<std::complex<double>>{
            {0.99, 0.0}, {0.0, -0.95}});
        const auto F = pushforward_density_blaschke(b, 4096);
        CHECK(F.mass() == doctest::Approx(1.0).epsilon(1e-6));
        // Poisson oracle at B(0) still holds at a spot away from the peak
        const auto w = b.eval(0.0);
        const double t = std::numbers::pi / 3.0;
        const auto bin = static_cast<std::size_t>(t / kTwoPi * 4096);
        const double poisson =
            (1.0 - std::norm(w)) / std::norm(std::polar(1.0, t) - w);
        CHECK(F.values[bin] == doctest::Approx(poisson).epsilon(1e-2));
    }
    SUBCASE("the density is the Poisson kernel at B(0)") {
        // pushforward of sigma under an inner map = harmonic measure at the
        // image of the origin; an independent closed form for every product
        std::vector<BlaschkeProduct> cases;
        cases.emplace_back(std::vector<std::complex<double>>{{0.3, 0.0}});
        cases.emplace_back(std::vector<std::complex<double>>{{0.3, 0.0}, {0.5, 0.0}});
        cases.emplace_back(std::vector<std::complex<double>>{
            {0.3, 0.1}, {-0.4, 0.0}, {0.0, 0.55}});
        for (const auto& b : cases) {
            const std::size_t bins = 4096;
            const auto F = pushforward_density_blaschke(b, bins);
            const auto w = b.eval(0.0);
            double worst = 0.0;
            for (std::size_t i = 0; i < bins; ++i) {
                const double t = kTwoPi * (static_cast<double>(i) + 0.5) / bins;
                const double poisson =
                    (1.0 - std::norm(w)) / std::norm(std::polar(1.0, t) - w);
                worst = std::max(worst, std::abs(F.values[i] - poisson));
            }
            CHECK(worst < 5e-4);  // bin averaging vs midpoint, O(h^2)
        }
    }
    SUBCASE("nonconstant density: MC matches the analytic path, degrees 2-3") {
        std::vector<BlaschkeProduct> cases;
        cases.emplace_back(std::vector<std::complex<double>>{{0.3, 0.0}, {0.5, 0.0}});
        cases.emplace_back(std::vector<std::complex<double>>{
            {0.3, 0.0}, {0.5, 0.0}, {-0.2, 0.4}});
        for (const auto& b : cases) {
            const auto Fa = pushforward_density_blaschke(b, 256);
            const auto Fm = pushforward_density_mc(AnalyticSelfMap::blaschke(b),
                                                   nullptr, 2.0, 400000, 256, 99);
            double sup = 0.0, diff = 0.0;
            for (std::size_t i = 0; i < 256; ++i) {
                sup = std::max(sup, Fa.values[i]);
                diff = std::max(diff, std::abs(Fa.values[i] - Fm.values[i]));
            }
            // the density peak is the Poisson maximum at B(0), away from 1
            const double w = std::abs(b.eval(0.0));
            const double peak = (1.0 + w) / (1.0 - w);
            CHECK(w > 0.05);
            CHECK(sup == doctest::Approx(peak).epsilon(0.02));
            CHECK(diff / sup <= 0.03);
        }
    }
    SUBCASE("rotation equivariance: e^{i alpha} phi shifts the density") {
        const std::size_t bins = 1024;
        const std::size_t shift = bins / 8;
        const double alpha = kTwoPi * static_cast<double>(shift) / bins;
        const BlaschkeProduct b(
            std::vector<std::complex<double>>{{0.5, 0.0}, {-0.2, 0.3}});
        const BlaschkeProduct rotated(
            std::vector<std::complex<double>>{{0.5, 0.0}, {-0.2, 0.3}},
                                      std::polar(1.0, alpha));
        const auto F = pushforward_density_blaschke(b, bins);
        const auto G = pushforward_density_blaschke(rotated, bins);
        for (std::size_t i = 0; i < bins; ++i)
            CHECK(G.values[(i + shift) % bins] ==
                  doctest::Approx(F.values[i]).epsilon(1e-9));
    }
}

TEST_CASE("Monte Carlo pushforward densities") {
    const std::uint64_t seed = 424242;
    SUBCASE("z^2: within 3% of the constant density at 10^5 samples") {
        const auto phi = AnalyticSelfMap::parse("blaschke: 0,0");
        const auto F = pushforward_density_mc(phi, nullptr, 2.0, 100000, 256, seed);
        for (double v : F.values) CHECK(std::abs(v - 1.0) <= 0.03);
        CHECK(F.contact_fraction == doctest::Approx(1.0));
        CHECK(!F.low_contact_warning);
    }
    SUBCASE("MC matches the analytic density for zeros 0, 0.5") {
        const BlaschkeProduct b(
            std::vector<std::complex<double>>{{0.0, 0.0}, {0.5, 0.0}});
        const auto Fa = pushforward_density_blaschke(b, 256);
        const auto Fm = pushforward_density_mc(AnalyticSelfMap::blaschke(b),
                                               nullptr, 2.0, 200000, 256, seed);
        double sup = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < 256; ++i) {
            sup = std::max(sup, Fa.values[i]);
            diff = std::max(diff, std::abs(Fa.values[i] - Fm.values[i]));
        }
        CHECK(diff / sup <= 0.03);
    }
    SUBCASE("weights enter as |u|^q") {
        // u = constant c scales the density by c^q
        const auto phi = AnalyticSelfMap::parse("blaschke: 0");
        std::function<std::complex<double>(double)> u =
            [](double) -> std::complex<double> { return {2.0, 0.0}; };
        const auto F = pushforward_density_mc(phi, &u, 2.0, 50000, 128, seed);
        CHECK(F.mass() == doctest::Approx(4.0).epsilon(1e-6));
    }
    SUBCASE("near-compact symbols trigger the low-contact warning") {
        const auto phi = AnalyticSelfMap::parse("taylor: 0.5, 0.5");
        const auto F =
            pushforward_density_mc(phi, nullptr, 2.0, 50000, 128, seed, 1e-6);
        CHECK(F.low_contact_warning);
        CHECK(F.contact_fraction < 0.01);
    }
    SUBCASE("determinism in (seed, shards)") {
        const auto phi = AnalyticSelfMap::parse("blaschke: 0,0");
        const auto F1 = pushforward_density_mc(phi, nullptr, 2.0, 50000, 128, 7, 1e-3, 3);
        const auto F2 = pushforward_density_mc(phi, nullptr, 2.0, 50000, 128, 7, 1e-3, 3);
        CHECK(F1.values == F2.values);
        const auto F3 = pushforward_density_mc(phi, nullptr, 2.0, 50000, 128, 8, 1e-3, 3);
        CHECK(F1.values != F3.values);
    }
    SUBCASE("contact set estimate for an inner map") {
        const auto phi = AnalyticSelfMap::parse("blaschke: 0.5");
        const auto est = estimate_contact_set(phi, 20000, 64, seed);
        CHECK(est.measure == doctest::Approx(1.0));
    }
}

TEST_CASE("weighted MC pushforward matches the sheet-sum closed form") {
    // density of the pushforward of |u|^q dsigma at angle t:
    // sum over the preimage sheets of |u(theta)|^q / tau'(theta)
    const BlaschkeProduct b(
        std::vector<std::complex<double>>{{0.3, 0.0}, {0.5, 0.0}});
    const double q = 2.0;
    auto u = [](double xi) { return 1.0 + 0.5 * std::cos(xi); };
    std::function<std::complex<double>(double)> uw =
        [&](double xi) -> std::complex<double> { return {u(xi), 0.0}; };

    const std::size_t bins = 256;
    const auto Fm = pushforward_density_mc(AnalyticSelfMap::blaschke(b), &uw, q,
                                           400000, bins, 7);
    const int deg = b.degree();
    const double tau0 = b.tau(0.0);
    double sup = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        const double t = kTwoPi * (static_cast<double>(i) + 0.5) / bins;
        double y = t + kTwoPi * std::ceil((tau0 - t) / kTwoPi);
        double oracle = 0.0;
        for (; y < tau0 + kTwoPi * deg; y += kTwoPi) {
            const double theta = b.tau_inverse(y);
            oracle += std::pow(u(theta), q) / b.tau_prime(theta);
        }
        sup = std::max(sup, oracle);
        diff = std::max(diff, std::abs(Fm.values[i] - oracle));
    }
    CHECK(diff / sup <= 0.03);
}

TEST_CASE("composition essential norm bracket") {
    const auto quad42 = derive_exponents(Exponent(4.0), Exponent(2.0));
    PushforwardDensity unit;
    unit.values.assign(512, 1.0);

    SUBCASE("density 1 gives the bracket [1, 1] at q = 2") {
        const auto est = essnorm_composition(unit, quad42);
        CHECK(est.lower == doctest::Approx(1.0));
        CHECK(est.upper == doctest::Approx(1.0));
        CHECK(est.method == "Theorem 3.1");
    }
    SUBCASE("q != 2 gets the factor 2") {
        const auto quad41 = derive_exponents(Exponent(4.0), Exponent(1.0));
        const auto est = essnorm_composition(unit, quad41);
        CHECK(est.upper == doctest::Approx(2.0 * est.lower));
    }
    SUBCASE("zero density is the compact case") {
        PushforwardDensity zero;
        zero.values.assign(512, 0.0);
        const auto est = essnorm_composition(zero, quad42);
        CHECK(est.lower == 0.0);
        CHECK(est.upper == 0.0);
    }
    SUBCASE("p <= q rejected") {
        CHECK_THROWS_AS(
            essnorm_composition(unit, derive_exponents(Exponent(2.0), Exponent(4.0))),
            std::invalid_argument);
    }
}
