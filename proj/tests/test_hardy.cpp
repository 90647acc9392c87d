#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "essnorm/hardy.hpp"
#include "essnorm/rng.hpp"

using namespace essnorm;
using namespace essnorm::hardy;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CircleGridFunction log_smooth(std::size_t n, Xoshiro256pp& rng) {
    double a[4], b[4];
    for (int k = 0; k < 4; ++k) {
        a[k] = rng.uniform(-0.5, 0.5);
        b[k] = rng.uniform(-0.5, 0.5);
    }
    return CircleGridFunction::sample(
        {n}, [&](const std::vector<double>& th) -> std::complex<double> {
            double s = 0.0;
            for (int k = 0; k < 4; ++k)
                s += a[k] * std::cos((k + 1) * th[0]) +
                     b[k] * std::sin((k + 1) * th[0]);
            return std::exp(s);
        });
}

}  // namespace

TEST_CASE("hp_norm reference values") {
    CHECK(hp_norm(CircleGridFunction::constant({256}, {3.0, -4.0}), Exponent(7.0)) ==
          doctest::Approx(5.0));
    // ||1+z||_4 = 6^{1/4}: the mean of (2+2cos)^2 is 6
    const auto f = CircleGridFunction::sample(
        {4096}, [](const std::vector<double>& th) -> std::complex<double> {
            return 1.0 + std::polar(1.0, th[0]);
        });
    CHECK(hp_norm(f, Exponent(4.0)) == doctest::Approx(std::pow(6.0, 0.25)));
    CHECK(hp_norm(f, Exponent::infinity()) == doctest::Approx(2.0));
}

TEST_CASE("Parseval matches quadrature for trigonometric polynomials") {
    Xoshiro256pp rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        FrequencyPolynomial poly;
        poly.axes = 1;
        for (int k = -20; k <= 20; ++k)
            if (rng.uniform() < 0.4)
                poly.coeffs[{k, 0, 0}] = {rng.uniform(-1.0, 1.0),
                                          rng.uniform(-1.0, 1.0)};
        if (poly.coeffs.empty()) continue;
        const auto g = poly.evaluate({256});
        CHECK(hp_norm(g, Exponent(2.0)) ==
              doctest::Approx(poly.l2_norm()).epsilon(1e-10));
    }
}

TEST_CASE("frequency polynomial evaluation agrees pointwise") {
    FrequencyPolynomial poly;
    poly.axes = 2;
    poly.coeffs[{0, 0, 0}] = 1.0;
    poly.coeffs[{2, 1, 0}] = {0.5, 0.5};
    poly.coeffs[{-1, 0, 0}] = {0.0, -1.0};
    const auto g = poly.evaluate({16, 8});
    for (std::size_t j0 : {std::size_t{0}, std::size_t{5}, std::size_t{11}}) {
        for (std::size_t j1 : {std::size_t{0}, std::size_t{3}}) {
            const auto direct =
                poly.eval_at({kTwoPi * j0 / 16.0, kTwoPi * j1 / 8.0});
            CHECK(std::abs(g.values[j0 * 8 + j1] - direct) < 1e-12);
        }
    }
    CHECK(!poly.analytic());
    CHECK(poly.shifted({1, 0, 0}).analytic());
}

TEST_CASE("outer function with prescribed modulus") {
    SUBCASE("G = 1 gives g = 1") {
        const auto res = outer_with_modulus(CircleGridFunction::constant({512}, 1.0));
        for (const auto& v : res.g.values) CHECK(std::abs(v - 1.0) < 1e-12);
    }
    SUBCASE("G = |1+z| is realized by an outer function") {
        // clamping kicks in at the zero of 1+z; the modulus must still match
        const auto G = CircleGridFunction::sample(
            {4096}, [](const std::vector<double>& th) -> std::complex<double> {
                return std::abs(1.0 + std::polar(1.0, th[0]));
            });
        const auto res = outer_with_modulus(G);
        CHECK(res.modulus_error < 1e-6);
        CHECK(res.analytic_residual < 1e-4);
    }
    SUBCASE("log-smooth G: tight modulus match and analyticity") {
        Xoshiro256pp rng(23);
        for (int trial = 0; trial < 10; ++trial) {
            const auto G = log_smooth(2048, rng);
            const auto res = outer_with_modulus(G);
            CHECK(!res.clamped);
            CHECK(res.modulus_error < 1e-6);
            CHECK(res.analytic_residual < 1e-12);
        }
    }
    SUBCASE("non-finite moduli are rejected") {
        auto G = CircleGridFunction::constant({64}, 1.0);
        G.values[5] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(outer_with_modulus(G), std::invalid_argument);
    }
}

TEST_CASE("Hoelder extremizer") {
    SUBCASE("constant F") {
        const auto res = holder_extremizer(CircleGridFunction::constant({512}, 2.5), 2.0);
        CHECK(res.value == doctest::Approx(2.5));
        for (const auto& v : res.G.values) CHECK(std::abs(v - 1.0) < 1e-12);
    }
    SUBCASE("F = |1+z|^2 at s = 2 pairs to sqrt(6)") {
        const auto F = CircleGridFunction::sample(
            {4096}, [](const std::vector<double>& th) -> std::complex<double> {
                return 2.0 + 2.0 * std::cos(th[0]);
            });
        const auto res = holder_extremizer(F, 2.0);
        CHECK(res.value == doctest::Approx(std::sqrt(6.0)).epsilon(1e-9));
    }
    SUBCASE("zero F returns G = 1 with value 0") {
        const auto res = holder_extremizer(CircleGridFunction::constant({64}, 0.0), 2.0);
        CHECK(res.value == 0.0);
        for (const auto& v : res.G.values) CHECK(std::abs(v - 1.0) < 1e-12);
    }
    SUBCASE("optimality against random unit-norm competitors") {
        Xoshiro256pp rng(29);
        const auto F = log_smooth(1024, rng);
        const double s = 2.0, s_star = 2.0;
        const auto res = holder_extremizer(F, s);
        const std::size_t n = F.total();
        for (int trial = 0; trial < 100; ++trial) {
            // random nonnegative competitor normalized in L^{s*}
            std::vector<double> g(n);
            double norm = 0.0;
            for (auto& v : g) {
                v = rng.uniform();
                norm += std::pow(v, s_star);
            }
            norm = std::pow(norm / n, 1.0 / s_star);
            double pairing = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                pairing += F.values[i].real() * g[i] / norm;
            CHECK(pairing / n <= res.value + 1e-12);
        }
    }
}

TEST_CASE("sup realization over the H^p ball") {
    const auto quad = derive_exponents(Exponent(4.0), Exponent(2.0));
    SUBCASE("F = 1") {
        const auto res =
            superinner_sup_realize(CircleGridFunction::constant({1024}, 1.0), quad);
        CHECK(res.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(res.g_norm_p == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("F = |1+z|^2 realizes sqrt(6)") {
        const auto F = CircleGridFunction::sample(
            {4096}, [](const std::vector<double>& th) -> std::complex<double> {
                return 2.0 + 2.0 * std::cos(th[0]);
            });
        const auto res = superinner_sup_realize(F, quad);
        CHECK(res.value == doctest::Approx(std::sqrt(6.0)).epsilon(1e-6));
        CHECK(res.g_norm_p == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("20 random smooth F: value = ||F||_s within 1e-6") {
        Xoshiro256pp rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            const auto F = log_smooth(2048, rng);
            const auto res = superinner_sup_realize(F, quad);
            const double fs = hp_norm(F, Exponent(quad.s()));
            CHECK(std::abs(res.value - fs) <= 1e-6);
            CHECK(std::abs(res.g_norm_p - 1.0) <= 1e-6);
        }
    }
    SUBCASE("p = inf uses the constant extremizer") {
        const auto qinf = derive_exponents(Exponent::infinity(), Exponent(2.0));
        Xoshiro256pp rng(37);
        const auto F = log_smooth(1024, rng);
        const auto res = superinner_sup_realize(F, qinf);
        CHECK(res.value == doctest::Approx(hp_norm(F, Exponent(1.0))).epsilon(1e-9));
    }
}

TEST_CASE("Fejer approximation") {
    SUBCASE("constants are fixed") {
        const auto poly = fejer_approx(CircleGridFunction::constant({256}, 1.0), 16);
        CHECK(poly.coeffs.size() == 1);
        CHECK(std::abs(poly.coeffs.at({0, 0, 0}) - 1.0) < 1e-13);
    }
    SUBCASE("half-circle indicator: L1 error at degree 64") {
        const std::size_t n = 8192;
        auto f = CircleGridFunction::constant({n}, 0.0);
        for (std::size_t i = 0; i < n / 2; ++i) f.values[i] = 1.0;
        const auto approx = fejer_approx(f, 64).evaluate({n});
        double l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            l1 += std::abs(approx.values[i] - f.values[i]);
        CHECK(l1 / n <= 0.05);
    }
    SUBCASE("positivity and sup bounds on random nonnegative f") {
        Xoshiro256pp rng(41);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 512;
            auto f = CircleGridFunction::constant({n}, 0.0);
            double sup = 0.0;
            for (auto& v : f.values) {
                v = rng.uniform();
                sup = std::max(sup, v.real());
            }
            const int degree = 1 + static_cast<int>(rng.uniform() * 100.0);
            const auto approx = fejer_approx(f, degree).evaluate({n});
            for (const auto& v : approx.values) {
                CHECK(v.real() >= -1e-12);
                CHECK(v.real() <= sup + 1e-12);
            }
        }
    }
    SUBCASE("degree limits") {
        const auto f = CircleGridFunction::constant({64}, 1.0);
        CHECK_THROWS_AS(fejer_approx(f, 0), std::invalid_argument);
        CHECK_THROWS_AS(fejer_approx(f, 32), std::invalid_argument);
        CHECK_NOTHROW(fejer_approx(f, 31));
    }
}

TEST_CASE("analytic shift witness") {
    const auto quad = derive_exponents(Exponent(4.0), Exponent(2.0));
    SUBCASE("F = 1 has ratio 1 for all degrees and shifts") {
        const auto F = CircleGridFunction::constant({1024}, 1.0);
        for (int k : {1, 7, 50}) {
            const auto wit = analytic_shift_witness(F, quad, 8, k);
            CHECK(wit.ratio == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(wit.E.analytic());
        }
    }
    SUBCASE("F = 2+z: ratio approaches ||F||_4 and is shift-invariant") {
        const std::size_t n = 4096;
        const auto F = CircleGridFunction::sample(
            {n}, [](const std::vector<double>& th) -> std::complex<double> {
                return 2.0 + std::polar(1.0, th[0]);
            });
        const double target = hp_norm(F, Exponent(4.0));
        double prev = 0.0;
        for (int degree : {32, 64, 128, 256}) {
            const auto wit = analytic_shift_witness(F, quad, degree, 1);
            CHECK(wit.ratio >= prev - 1e-9);  // nondecreasing in the degree
            CHECK(wit.ratio <= target + 1e-6);
            prev = wit.ratio;
        }
        CHECK(prev >= 0.98 * target);
        const auto w1 = analytic_shift_witness(F, quad, 64, 1);
        const auto w50 = analytic_shift_witness(F, quad, 64, 50);
        CHECK(w1.ratio == doctest::Approx(w50.ratio).epsilon(1e-12));
    }
}

TEST_CASE("peaking sequence") {
    SUBCASE("F = 1, eps = 0.1, three levels: the Fact holds") {
        const auto F = CircleGridFunction::constant({65536}, 1.0);
        const auto pk = peaking_sequence(F, 0.1, 3);
        CHECK(pk.report.pass);
        for (const auto& pr : pk.report.pairs) {
            CHECK(pr.inside >= 0.125);
            CHECK(pr.outside < 0.4);
        }
        for (int i = 0; i < 3; ++i) {
            CHECK(pk.report.l1_norms[i] <= 1.0 + 1e-9);
            CHECK(pk.report.sup_values[i] <= pk.report.sup_bounds[i] + 1e-9);
        }
        // masses shrink at ratio 1/4
        CHECK(pk.level_masses[1] <= pk.level_masses[0] / 4.0 + 1e-12);
        CHECK(pk.level_masses[2] <= pk.level_masses[1] / 4.0 + 1e-12);
    }
    SUBCASE("smooth peak, two levels") {
        const auto F = CircleGridFunction::sample(
            {65536}, [](const std::vector<double>& th) -> std::complex<double> {
                return 0.5 * (1.0 + std::cos(th[0]));
            });
        const auto pk = peaking_sequence(F, 0.1, 2);
        CHECK(pk.report.pass);
    }
    SUBCASE("two-variable torus") {
        // the nested level is a band along one axis; its normalized indicator
        // needs per-axis Fejer resolution, hence the larger grid and eps
        const auto F = CircleGridFunction::constant({512, 512}, 1.0);
        const auto pk = peaking_sequence(F, 0.2, 2);
        CHECK(pk.report.pass);
        CHECK(pk.level_masses[1] <= pk.level_masses[0] / 4.0 + 1e-12);
    }
    SUBCASE("diagnostics when the superlevel set cannot nest") {
        auto F = CircleGridFunction::constant({256}, 0.5);
        F.values[0] = 1.0;  // superlevel set is a single cell
        CHECK_THROWS_AS(peaking_sequence(F, 0.1, 3), std::runtime_error);
    }
    SUBCASE("parameter validation") {
        const auto F = CircleGridFunction::constant({256}, 1.0);
        CHECK_THROWS_AS(peaking_sequence(F, 0.3, 2), std::invalid_argument);
        CHECK_THROWS_AS(peaking_sequence(F, 0.0, 2), std::invalid_argument);
    }
}

TEST_CASE("function spec mini-language") {
    const auto c = parse_circle_function("const 2-1i", {64});
    CHECK(c.values[3] == std::complex<double>(2.0, -1.0));

    const auto p = parse_circle_function("poly: 1,1", {64});
    CHECK(std::abs(p.values[0] - 2.0) < 1e-12);  // 1 + z at theta = 0

    const auto a = parse_circle_function("abs-of-poly: 1,2,1", {64});
    // |(1+z)^2| = |1+z|^2 = 2 + 2cos
    CHECK(a.values[0].real() == doctest::Approx(4.0));
    CHECK(a.values[32].real() == doctest::Approx(0.0).epsilon(1e-9));

    const auto fn = parse_boundary_function("poly: (0)=2; (1)=1");
    CHECK(std::abs(fn(0.0) - 3.0) < 1e-12);
    CHECK_THROWS_AS(parse_circle_function("wat", {64}), std::invalid_argument);
}
