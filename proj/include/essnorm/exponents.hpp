#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

// Extended-real exponent arithmetic shared by every operator formula. The
// canonical stored forms are the reciprocals inv_r = 1/q - 1/p and
// inv_s = 1 - q/p, so that p = infinity and p < q need no special-casing:
// r and s are only materialized when their reciprocals are positive.

namespace essnorm {

/// An exponent in [1, +inf].
class Exponent {
public:
    explicit Exponent(double v) : v_(v) {
        if (!(v >= 1.0))  // also rejects NaN
            throw std::invalid_argument("exponent must be >= 1, got " +
                                        std::to_string(v));
    }

    static Exponent infinity() {
        return Exponent(std::numeric_limits<double>::infinity());
    }

    bool is_infinite() const { return std::isinf(v_); }
    double value() const { return v_; }

    /// 1/p, with 1/inf = 0.
    double reciprocal() const { return is_infinite() ? 0.0 : 1.0 / v_; }

    friend bool operator==(Exponent a, Exponent b) { return a.v_ == b.v_; }
    friend bool operator<(Exponent a, Exponent b) { return a.v_ < b.v_; }
    friend bool operator>(Exponent a, Exponent b) { return a.v_ > b.v_; }

private:
    double v_;
};

/// Conjugate exponent: 1/p + 1/p* = 1; conjugate(1) = inf, conjugate(inf) = 1.
inline Exponent conjugate(Exponent p) {
    if (p.is_infinite()) return Exponent(1.0);
    if (p.value() == 1.0) return Exponent::infinity();
    return Exponent(p.value() / (p.value() - 1.0));
}

/// The exponent bookkeeping (p, q, r, s, t and conjugates) used by every
/// theorem. For p > q both finite: r = pq/(p-q), s = p/(p-q), s* = p/q,
/// t = q/(p-q). For p = inf: r = q, s = 1. For p < q: inv_r < 0 and only the
/// reciprocal is meaningful downstream.
struct ExponentQuad {
    Exponent p;
    Exponent q;
    double inv_r = 0.0;  // 1/q - 1/p (signed)
    double inv_s = 0.0;  // 1 - q/p  (q/inf = 0)
    std::optional<double> t;  // q/(p-q), only when p > q with p finite
    Exponent p_star;
    Exponent q_star;
    std::optional<Exponent> s_star;  // p/q, only when p > q
    bool degenerate = false;         // p == q sentinel quad

    double r() const {
        if (!(inv_r > 0.0))
            throw std::logic_error("r is not materializable (1/r <= 0)");
        return 1.0 / inv_r;
    }
    double s() const {
        if (!(inv_s > 0.0))
            throw std::logic_error("s is not materializable (1/s <= 0)");
        return 1.0 / inv_s;
    }
};

/// Build the quad from (p, q). q must be finite unless p == q == inf is never
/// needed; p may be infinite. p == q is rejected unless allow_equal, in which
/// case inv_r = 0 is the degenerate sentinel.
inline ExponentQuad derive_exponents(Exponent p, Exponent q,
                                     bool allow_equal = false) {
    if (q.is_infinite())
        throw std::invalid_argument("q must be finite");
    if (p == q && !allow_equal)
        throw std::invalid_argument("p == q requires the degenerate quad");

    ExponentQuad quad{p, q, 0.0, 0.0, std::nullopt, conjugate(p), conjugate(q),
                      std::nullopt, p == q};
    quad.inv_r = q.reciprocal() - p.reciprocal();
    quad.inv_s = 1.0 - (p.is_infinite() ? 0.0 : q.value() / p.value());
    if (p > q) {
        if (p.is_infinite())
            quad.s_star = Exponent::infinity();
        else {
            quad.t = q.value() / (p.value() - q.value());
            quad.s_star = Exponent(p.value() / q.value());
        }
    }
    return quad;
}

/// Hölder bookkeeping self-check: 1/p + 1/r = 1/q and 1/s + q/p = 1, both to
/// 1e-12. False for corrupted quads.
inline bool holder_identity_check(const ExponentQuad& quad) {
    const double lhs1 = quad.p.reciprocal() + quad.inv_r - quad.q.reciprocal();
    const double qp = quad.p.is_infinite() ? 0.0 : quad.q.value() / quad.p.value();
    const double lhs2 = quad.inv_s + qp - 1.0;
    return std::abs(lhs1) <= 1e-12 && std::abs(lhs2) <= 1e-12;
}

}  // namespace essnorm
