#include <doctest.h>

#include <cmath>

#include "essnorm/exponents.hpp"
#include "essnorm/rng.hpp"

using essnorm::Exponent;
using essnorm::ExponentQuad;
using essnorm::conjugate;
using essnorm::derive_exponents;
using essnorm::holder_identity_check;

TEST_CASE("conjugate exponents") {
    CHECK(conjugate(Exponent(2.0)).value() == 2.0);
    CHECK(conjugate(Exponent::infinity()).value() == 1.0);
    CHECK(conjugate(Exponent(1.0)).is_infinite());
    // solve 1/4 + 1/p* = 1
    CHECK(conjugate(Exponent(4.0)).value() == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("derive_exponents on the reference cases") {
    SUBCASE("p=4, q=2: s=2, r=4, t=1, s*=2") {
        const auto quad = derive_exponents(Exponent(4.0), Exponent(2.0));
        CHECK(quad.s() == doctest::Approx(2.0));
        CHECK(quad.r() == doctest::Approx(4.0));
        CHECK(quad.t.value() == doctest::Approx(1.0));
        CHECK(quad.s_star->value() == doctest::Approx(2.0));
        CHECK(holder_identity_check(quad));
    }
    SUBCASE("p=inf, q=2: r=2, s=1") {
        const auto quad = derive_exponents(Exponent::infinity(), Exponent(2.0));
        CHECK(quad.r() == doctest::Approx(2.0));
        CHECK(quad.s() == doctest::Approx(1.0));
        CHECK(!quad.t.has_value());
        CHECK(quad.s_star->is_infinite());
    }
    SUBCASE("p=2, q=4: inv_r = 1/4 - 1/2 = -1/4") {
        // cross-check by brute evaluation of 1/q - 1/p
        const auto quad = derive_exponents(Exponent(2.0), Exponent(4.0));
        CHECK(quad.inv_r == doctest::Approx(0.25 - 0.5));
        CHECK_THROWS_AS(quad.r(), std::logic_error);
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(Exponent(0.5), std::invalid_argument);
        CHECK_THROWS_AS(derive_exponents(Exponent(2.0), Exponent(2.0)),
                        std::invalid_argument);
        CHECK_NOTHROW(derive_exponents(Exponent(2.0), Exponent(2.0), true));
        CHECK(derive_exponents(Exponent(2.0), Exponent(2.0), true).inv_r == 0.0);
    }
}

TEST_CASE("holder identity check") {
    // quad(3,1): 1/3 + 2/3 = 1, r = s = 3/2
    const auto quad = derive_exponents(Exponent(3.0), Exponent(1.0));
    CHECK(quad.r() == doctest::Approx(1.5));
    CHECK(quad.s() == doctest::Approx(1.5));
    CHECK(holder_identity_check(quad));

    auto corrupted = quad;
    corrupted.inv_r += 1e-6;
    CHECK(!holder_identity_check(corrupted));
}

TEST_CASE("reciprocal identities over random exponent pairs") {
    essnorm::Xoshiro256pp rng(11);
    for (int i = 0; i < 200; ++i) {
        const double q = rng.uniform(1.0, 49.0);
        const double p = rng.uniform(q + 1e-3, 50.0);
        const auto quad = derive_exponents(Exponent(p), Exponent(q));
        CHECK(std::abs(quad.inv_r - (1.0 / q - 1.0 / p)) <= 1e-12);
        CHECK(std::abs(quad.inv_s - (1.0 - q / p)) <= 1e-12);
        CHECK(std::abs(1.0 / quad.r() - (p - q) / (p * q)) <= 1e-10);
        CHECK(std::abs(1.0 / quad.s() - (p - q) / p) <= 1e-12);
    }
}

TEST_CASE("r(p, q) decreases to q as p grows") {
    const double q = 2.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= 14; ++k) {
        const auto quad = derive_exponents(Exponent(std::ldexp(1.0, k)), Exponent(q));
        const double r = quad.r();
        CHECK(r < prev);
        CHECK(r > q);
        prev = r;
    }
    CHECK(prev == doctest::Approx(q).epsilon(1e-3));
}
