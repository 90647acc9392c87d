#include <doctest.h>

#include <cmath>
#include <complex>

#include "essnorm/measure.hpp"
#include "essnorm/rng.hpp"

using namespace essnorm;
using namespace essnorm::measure;

namespace {

GridFunction coordinate(const MeasureSpace& space) {
    return GridFunction::on_cells(
        space, [](double x) { return std::complex<double>(x, 0.0); });
}

GridFunction random_function(const MeasureSpace& space, Xoshiro256pp& rng) {
    auto f = GridFunction::zero(space);
    for (auto& v : f.atom_values) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    for (auto& v : f.cell_values) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return f;
}

}  // namespace

TEST_CASE("lp_norm reference values") {
    SUBCASE("constant 1 on a probability space") {
        const auto space = MeasureSpace::lebesgue(10);
        const auto f = GridFunction::constant(space, 1.0);
        for (double p : {1.0, 2.0, 4.0, 7.5})
            CHECK(lp_norm(f, Exponent(p), space) == doctest::Approx(1.0));
        CHECK(lp_norm(f, Exponent::infinity(), space) == doctest::Approx(1.0));
    }
    SUBCASE("u(x) = x, p = 4: quadrature vs closed form (1/5)^{1/4}") {
        const auto space = MeasureSpace::lebesgue(16);
        const auto u = coordinate(space);
        CHECK(lp_norm(u, Exponent(4.0), space) ==
              doctest::Approx(std::pow(0.2, 0.25)).epsilon(1e-6));
    }
    SUBCASE("single atom of mass 1/2, value 2, p = 2") {
        const auto space = MeasureSpace::atoms_only({{"A", 0.5}});
        auto f = GridFunction::zero(space);
        f.atom_values[0] = 2.0;
        CHECK(lp_norm(f, Exponent(2.0), space) == doctest::Approx(std::sqrt(2.0)));
    }
}

TEST_CASE("measure space parsing") {
    const auto space = MeasureSpace::parse(
        "atoms: A=0.5, B=0.25; diffuse: m=4, density=1");
    CHECK(space.atom_count() == 2);
    CHECK(space.cell_count() == 16);
    CHECK(space.total_mass() == doctest::Approx(1.75));
    CHECK(space.atoms()[1].label == "B");

    const auto xspace = MeasureSpace::parse("diffuse: m=8, density=x");
    CHECK(xspace.diffuse_mass() == doctest::Approx(0.5).epsilon(1e-4));

    CHECK_THROWS_AS(MeasureSpace::parse("atoms: A=-1"), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpace::parse("nonsense"), std::invalid_argument);
}

TEST_CASE("conditional expectation block means") {
    const auto space = MeasureSpace::lebesgue(10);
    SUBCASE("constants are fixed") {
        const auto f = GridFunction::constant(space, {2.0, -1.0});
        const auto ef = conditional_expectation(f, {3}, space);
        for (const auto& v : ef.cell_values)
            CHECK(std::abs(v - std::complex<double>{2.0, -1.0}) < 1e-14);
    }
    SUBCASE("f(x) = x at level 1 averages to 1/4 and 3/4") {
        const auto f = coordinate(space);
        const auto ef = conditional_expectation(f, {1}, space);
        CHECK(ef.cell_values.front().real() == doctest::Approx(0.25).epsilon(1e-6));
        CHECK(ef.cell_values.back().real() == doctest::Approx(0.75).epsilon(1e-6));
    }
    SUBCASE("finest level is the identity") {
        Xoshiro256pp rng(3);
        const auto f = random_function(space, rng);
        const auto ef = conditional_expectation(f, {space.level()}, space);
        for (std::size_t i = 0; i < f.cell_values.size(); ++i)
            CHECK(std::abs(ef.cell_values[i] - f.cell_values[i]) < 1e-15);
    }
    SUBCASE("zero-mass blocks map to zero") {
        std::vector<double> density(16, 0.0);
        for (int i = 8; i < 16; ++i) density[i] = 1.0;
        MeasureSpace half({}, density);
        const auto f = GridFunction::constant(half, 5.0);
        const auto ef = conditional_expectation(f, {1}, half);
        CHECK(ef.cell_values.front() == std::complex<double>{0.0, 0.0});
        CHECK(ef.cell_values.back() == std::complex<double>{5.0, 0.0});
    }
}

TEST_CASE("conditional expectation is a contraction and converges") {
    const auto space = MeasureSpace::lebesgue(8);
    Xoshiro256pp rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_function(space, rng);
        const int level = static_cast<int>(rng.uniform() * 9.0);
        const auto ef = conditional_expectation(f, {level}, space);
        for (double q : {1.0, 2.0, 4.0})
            CHECK(lp_norm(ef, Exponent(q), space) <=
                  lp_norm(f, Exponent(q), space) + 1e-12);
        CHECK(lp_norm(ef, Exponent::infinity(), space) <=
              lp_norm(f, Exponent::infinity(), space) + 1e-12);
        // idempotent
        const auto eef = conditional_expectation(ef, {level}, space);
        for (std::size_t i = 0; i < ef.cell_values.size(); ++i)
            CHECK(std::abs(eef.cell_values[i] - ef.cell_values[i]) < 1e-13);
    }
    // ||Q_n f - f||_q decreasing in n for a continuous f, equality at n = m
    const auto f = GridFunction::on_cells(space, [](double x) {
        return std::complex<double>(std::sin(6.283185307179586 * x), 0.0);
    });
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= space.level(); ++n) {
        auto diff = conditional_expectation(f, {n}, space);
        for (std::size_t i = 0; i < diff.cell_values.size(); ++i)
            diff.cell_values[i] -= f.cell_values[i];
        const double err = lp_norm(diff, Exponent(2.0), space);
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
    CHECK(prev <= 1e-14);
}

TEST_CASE("halving split") {
    const auto space = MeasureSpace::lebesgue(12);
    SUBCASE("uniform weight splits at 1/2") {
        const std::vector<double> w(space.cell_count(), 1.0);
        const auto res = halving_split(CellSet::all(space), w, space);
        CHECK(!res.degenerate);
        const double i1 = res.half1.weighted_integral(w, space);
        const double i2 = res.half2.weighted_integral(w, space);
        CHECK(i1 == doctest::Approx(i2).epsilon(1e-13));
        // the boundary sits at x = 1/2
        std::size_t last = 0;
        for (std::size_t i = 0; i < space.cell_count(); ++i)
            if (res.half1.fraction[i] > 0.0) last = i;
        CHECK(std::abs((last + 1.0) * space.cell_width() - 0.5) <=
              space.cell_width());
    }
    SUBCASE("weight x splits at 1/sqrt(2)") {
        std::vector<double> w(space.cell_count());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = space.cell_center(i);
        const auto res = halving_split(CellSet::all(space), w, space);
        const double i1 = res.half1.weighted_integral(w, space);
        const double i2 = res.half2.weighted_integral(w, space);
        CHECK(i1 == doctest::Approx(i2).epsilon(1e-12));
        std::size_t last = 0;
        for (std::size_t i = 0; i < space.cell_count(); ++i)
            if (res.half1.fraction[i] > 0.0) last = i;
        CHECK(std::abs((last + 0.5) * space.cell_width() - 1.0 / std::sqrt(2.0)) <=
              2.0 * space.cell_width());
    }
    SUBCASE("zero weight is degenerate") {
        const std::vector<double> w(space.cell_count(), 0.0);
        const auto res = halving_split(CellSet::all(space), w, space);
        CHECK(res.degenerate);
        CHECK(res.half1.fraction == CellSet::all(space).fraction);
    }
    SUBCASE("negative weight rejected") {
        std::vector<double> w(space.cell_count(), 1.0);
        w[3] = -0.5;
        CHECK_THROWS_AS(halving_split(CellSet::all(space), w, space),
                        std::invalid_argument);
    }
}

TEST_CASE("sign witness") {
    const auto space = MeasureSpace::lebesgue(16);
    const auto quad = derive_exponents(Exponent(4.0), Exponent(2.0));

    SUBCASE("constant u: alternating unit witness, ratio 1") {
        const auto u = GridFunction::constant(space, 1.0);
        const auto wit = sign_witness(u, quad, 3, space);
        const double ratio =
            lp_norm(pointwise_product(diffuse_part(u, space), wit.modulus),
                    quad.q, space) /
            lp_norm(wit.modulus, quad.p, space);
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
        for (double v : wit.block_integrals) CHECK(std::abs(v) <= 1e-14);
    }
    SUBCASE("u(x) = x: ratio equals ||u||_4 = (1/5)^{1/4}") {
        const auto u = coordinate(space);
        for (int level : {0, 2, 5}) {
            const auto wit = sign_witness(u, quad, level, space);
            const double ratio =
                lp_norm(pointwise_product(u, wit.modulus), quad.q, space) /
                lp_norm(wit.modulus, quad.p, space);
            CHECK(ratio ==
                  doctest::Approx(lp_norm(u, Exponent(4.0), space)).epsilon(1e-9));
            // per-block orthogonality, machine exact
            for (double v : wit.block_integrals)
                CHECK(std::abs(v) <= 1e-14 * space.total_mass());
            // the plain signed integral over each block also cancels
            const auto eg = conditional_expectation(wit.signed_values, {level}, space);
            for (const auto& v : eg.cell_values) CHECK(std::abs(v) <= 1e-13);
        }
    }
    SUBCASE("witness norms match the closed forms") {
        const auto u = coordinate(space);
        const auto wit = sign_witness(u, quad, 4, space);
        const double ur = lp_norm(u, Exponent(quad.r()), space);
        const double rp = quad.r() / quad.p.value();
        const double rq = quad.r() / quad.q.value();
        CHECK(lp_norm(wit.modulus, quad.p, space) ==
              doctest::Approx(std::pow(ur, rp)).epsilon(1e-9));
        CHECK(lp_norm(pointwise_product(u, wit.modulus), quad.q, space) ==
              doctest::Approx(std::pow(ur, rq)).epsilon(1e-9));
    }
    SUBCASE("zero u gives the zero witness") {
        const auto u = GridFunction::zero(space);
        const auto wit = sign_witness(u, quad, 2, space);
        for (const auto& v : wit.signed_values.cell_values)
            CHECK(v == std::complex<double>{0.0, 0.0});
    }
    SUBCASE("uniform witness: E(u g | A_n) = 0 for nonnegative u") {
        const auto u = coordinate(space);
        const auto wit = sign_witness_uniform(u, 3, space);
        const auto ug = pointwise_product(u, wit.signed_values);
        const auto proj = conditional_expectation(ug, {3}, space);
        for (const auto& v : proj.cell_values) CHECK(std::abs(v) <= 1e-13);
        // |g| = 1 on the diffuse part
        for (const auto& v : wit.modulus.cell_values)
            CHECK(v == std::complex<double>{1.0, 0.0});
    }
    SUBCASE("p = inf rejected") {
        const auto qinf = derive_exponents(Exponent::infinity(), Exponent(2.0));
        CHECK_THROWS_AS(
            sign_witness(GridFunction::constant(space, 1.0), qinf, 2, space),
            std::invalid_argument);
    }
}

TEST_CASE("tail truncation") {
    std::vector<Atom> atoms = {{"A0", 0.5}, {"A1", 0.25}};
    MeasureSpace space(atoms, std::vector<double>(16, 1.0));
    auto u = GridFunction::constant(space, 1.0);

    SUBCASE("N past the atom count keeps all atoms") {
        const auto t = tail_truncation(u, 5, space);
        CHECK(t.atom_values[0] == std::complex<double>{1.0, 0.0});
        CHECK(t.atom_values[1] == std::complex<double>{1.0, 0.0});
        CHECK(t.cell_values[0] == std::complex<double>{0.0, 0.0});
    }
    SUBCASE("N = 0 is the zero function") {
        const auto t = tail_truncation(u, 0, space);
        for (const auto& v : t.atom_values) CHECK(v == std::complex<double>{0.0, 0.0});
    }
    SUBCASE("||u - u_N||_r decreases to the diffuse norm") {
        const auto quad = derive_exponents(Exponent(4.0), Exponent(2.0));
        const double limit =
            lp_norm(diffuse_part(u, space), Exponent(quad.r()), space);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t N = 0; N <= 2; ++N) {
            auto tail = u;
            const auto uN = tail_truncation(u, N, space);
            for (std::size_t i = 0; i < tail.atom_values.size(); ++i)
                tail.atom_values[i] -= uN.atom_values[i];
            const double v = lp_norm(tail, Exponent(quad.r()), space);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
        CHECK(prev == doctest::Approx(limit));
    }
}
