#include "essnorm/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "essnorm/kernels.hpp"
#include "essnorm/rng.hpp"

namespace essnorm::ops {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double multiplier_norm_exact(const measure::GridFunction& u,
                             const ExponentQuad& quad,
                             const measure::MeasureSpace& space) {
    if (!(quad.inv_r > 0.0))
        throw std::invalid_argument("multiplier norm formula requires p > q");
    return measure::lp_norm(u, Exponent(quad.r()), space);
}

BoundEstimate multiplier_essnorm(const measure::GridFunction& u,
                                 const ExponentQuad& quad,
                                 const measure::MeasureSpace& space) {
    if (!(quad.inv_r > 0.0))
        throw std::invalid_argument(
            "multiplier essential norm requires p > q (use the p<q variant)");
    const auto ud = measure::diffuse_part(u, space);
    if (!quad.p.is_infinite()) {
        const double v = measure::lp_norm(ud, Exponent(quad.r()), space);
        return BoundEstimate(v, v, "||u restricted to the diffuse part||_r",
                             "Theorem 1.4");
    }
    if (quad.q.value() == 2.0) {
        const double v = measure::lp_norm(ud, Exponent(2.0), space);
        return BoundEstimate(v, v, "||u_d||_2 (orthogonal projections close the gap)",
                             "Corollary inf->2");
    }
    const double v = measure::lp_norm(ud, quad.q, space);
    return BoundEstimate(0.5 * v, v, "bracket [||u_d||_q / 2, ||u_d||_q]",
                         "Theorem 1.5");
}

SmallPResult multiplier_essnorm_smallp(const measure::GridFunction& u,
                                       const ExponentQuad& quad,
                                       const measure::MeasureSpace& space,
                                       TailWindow window) {
    if (!(quad.inv_r < 0.0))
        throw std::invalid_argument("this formula requires p < q");
    u.check_shape(space);
    for (std::size_t i = 0; i < space.cell_count(); ++i)
        if (std::abs(u.cell_values[i]) > 0.0 && space.density()[i] > 0.0)
            throw std::invalid_argument(
                "p < q multipliers must vanish on the diffuse part");

    const std::size_t n_atoms = space.atom_count();
    std::vector<double> ratio(n_atoms, 0.0);
    for (std::size_t k = 0; k < n_atoms; ++k)
        ratio[k] =
            std::abs(u.atom_values[k]) * std::pow(space.atom_mass(k), quad.inv_r);

    const std::size_t start = std::min(window.start, n_atoms);
    const std::size_t end =
        window.count == 0 ? n_atoms : std::min(n_atoms, start + window.count);

    SmallPResult res;
    res.window_start = start;
    // tail operator norms: nonincreasing sups over shrinking tails
    std::vector<double> suffix(n_atoms + 1, 0.0);
    for (std::size_t k = n_atoms; k-- > 0;)
        suffix[k] = std::max(suffix[k + 1], ratio[k]);
    for (std::size_t nidx = start; nidx < end; ++nidx)
        res.tail_norms.push_back(suffix[nidx]);

    double value = 0.0;
    std::size_t arg = start;
    for (std::size_t k = start; k < end; ++k)
        if (ratio[k] > value) {
            value = ratio[k];
            arg = k;
        }
    std::string wit = n_atoms == 0 ? "no atoms"
                                   : "atom '" + space.atoms()[std::min(arg, n_atoms - 1)].label +
                                         "' over window [" + std::to_string(start) +
                                         ", " + std::to_string(end) + ")";
    res.estimate = BoundEstimate(value, value, wit, "Proposition 5.3");
    return res;
}

double bound_engine_lower(const std::function<double(int)>& oracle, int n_begin,
                          int n_end, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    double best = 0.0;
    for (int n = n_begin; n < n_end; ++n) best = std::max(best, oracle(n));
    return best / lambda;
}

double bound_engine_upper(const std::function<double(int)>& oracle, int n_begin,
                          int n_end) {
    double best = std::numeric_limits<double>::infinity();
    for (int n = n_begin; n < n_end; ++n) best = std::min(best, oracle(n));
    return best;
}

double bound_engine_lower(const std::function<double(int)>& oracle,
                          const ProjectionSequence& seq) {
    return bound_engine_lower(oracle, seq.n_begin, seq.n_end,
                              seq.remainder_norm_bound());
}

double bound_engine_upper(const std::function<double(int)>& oracle,
                          const ProjectionSequence& seq) {
    return bound_engine_upper(oracle, seq.n_begin, seq.n_end);
}

double carleson_hat(const CarlesonMeasure& mu, double xi_angle) {
    const std::complex<double> xi = std::polar(1.0, xi_angle);
    double s = 0.0;
    for (const auto& pm : mu.interior) {
        const double one_minus = 1.0 - std::norm(pm.z);
        // admissible region membership, closed form for d = 1; the boundary
        // case (|z| = 0) counts as inside
        if (std::abs(1.0 - pm.z * std::conj(xi)) <= one_minus)
            s += pm.mass / one_minus;
    }
    return s;
}

BoundEstimate inclusion_essnorm(const CarlesonMeasure& mu,
                                const ExponentQuad& quad) {
    if (!(quad.inv_s > 0.0))
        throw std::invalid_argument("inclusion essential norm requires p > q");
    const auto& F = mu.boundary_density;
    double v = 0.0;
    if (F.total() > 0) {
        const double s = quad.s();
        const std::size_t n = F.total();
        const double sum = kern::weighted_abs_pow_sum(F.values.data(), nullptr, n, s);
        v = std::pow(std::pow(sum / static_cast<double>(n), 1.0 / s),
                     1.0 / quad.q.value());
    }
    return BoundEstimate(v, v, "boundary density in L^s", "Theorem 2.4");
}

double dilation_remainder_bound(const CarlesonMeasure& mu,
                                const ExponentQuad& quad, int n) {
    if (n < 1) throw std::invalid_argument("dilation index must be >= 1");
    // |f(z) - f((1-1/n)z)| <= (rho/n) sup_{|w|=rho} |f'(w)| and the Cauchy
    // bound on the circle of radius (1+rho)/2 with the H^p point estimate
    // |f(zeta)| <= ||f||_p (1-|zeta|^2)^{-1/p}
    const double q = quad.q.value();
    const double inv_p = quad.p.reciprocal();
    double acc = 0.0;
    for (const auto& pm : mu.interior) {
        const double rho = std::abs(pm.z);
        const double rhat = 0.5 * (1.0 + rho);
        const double growth = std::pow(1.0 - rhat * rhat, -inv_p);
        const double deriv = rhat * growth * 4.0 / ((1.0 - rho) * (1.0 - rho));
        const double bound = rho / static_cast<double>(n) * deriv;
        acc += pm.mass * std::pow(bound, q);
    }
    return std::pow(acc, 1.0 / q);
}

ChangeOfVarResult change_of_variables_check(
    const disc::AnalyticSelfMap& phi,
    const std::function<std::complex<double>(double)>& f, double q,
    std::size_t samples, std::uint64_t seed,
    const disc::PushforwardDensity& density) {
    ChangeOfVarResult res;
    Xoshiro256pp rng(seed);
    double acc = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double xi = kTwoPi * (static_cast<double>(i) + rng.uniform()) /
                          static_cast<double>(samples);
        const auto tr = disc::boundary_trace(phi, xi);
        if (std::abs(tr.value) <= 1.0 - 1e-3) continue;
        ++hits;
        double t = std::arg(tr.value);
        acc += std::pow(std::abs(f(t)), q);
    }
    res.lhs = acc / static_cast<double>(samples);
    res.contact_fraction = static_cast<double>(hits) / static_cast<double>(samples);
    res.low_contact_warning = res.contact_fraction < 0.01;

    const std::size_t bins = density.bins();
    double rhs = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double t = kTwoPi * (static_cast<double>(b) + 0.5) / bins;
        rhs += density.values[b] * std::pow(std::abs(f(t)), q);
    }
    res.rhs = rhs / static_cast<double>(bins);
    res.gap = std::abs(res.lhs - res.rhs);
    return res;
}

MeCphiResult me_cphi_norm(const disc::BlaschkeProduct& b, const ExponentQuad& quad,
                          std::size_t bins, std::size_t samples,
                          std::uint64_t seed) {
    if (!(quad.inv_s > 0.0))
        throw std::invalid_argument("requires p > q");
    const double q = quad.q.value();
    const auto F = disc::pushforward_density_blaschke(b, bins);

    hardy::CircleGridFunction Fg;
    Fg.dims = {bins};
    Fg.values.assign(bins, {0.0, 0.0});
    for (std::size_t i = 0; i < bins; ++i) Fg.values[i] = F.values[i];
    const auto sup = hardy::superinner_sup_realize(Fg, quad);

    // MC integral of |g o phi*|^q over the contact set, g linearly
    // interpolated between grid nodes
    const auto& g = sup.g.values;
    auto g_at = [&](double t) {
        t = std::fmod(t, kTwoPi);
        if (t < 0) t += kTwoPi;
        const double x = t / kTwoPi * static_cast<double>(bins);
        const std::size_t lo = std::min<std::size_t>(
            static_cast<std::size_t>(x), bins - 1);
        const double frac = x - static_cast<double>(lo);
        return g[lo] * (1.0 - frac) + g[(lo + 1) % bins] * frac;
    };

    Xoshiro256pp rng(seed);
    const auto phi = disc::AnalyticSelfMap::blaschke(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double xi = kTwoPi * (static_cast<double>(i) + rng.uniform()) /
                          static_cast<double>(samples);
        const auto tr = disc::boundary_trace(phi, xi);
        if (std::abs(tr.value) <= 1.0 - 1e-3) continue;
        acc += std::pow(std::abs(g_at(std::arg(tr.value))), q);
    }
    MeCphiResult res;
    res.value = std::pow(acc / static_cast<double>(samples), 1.0 / q);
    res.expected = std::pow(F.ls_norm(quad.s()), 1.0 / q);
    res.rel_gap = res.expected > 0.0
                      ? std::abs(res.value - res.expected) / res.expected
                      : res.value;
    return res;
}

GridMap GridMap::identity(const measure::MeasureSpace& space) {
    GridMap m;
    m.atom_targets.resize(space.atom_count());
    m.cell_targets.resize(space.cell_count());
    for (std::size_t i = 0; i < space.atom_count(); ++i)
        m.atom_targets[i] = {true, i};
    for (std::size_t i = 0; i < space.cell_count(); ++i)
        m.cell_targets[i] = {false, i};
    return m;
}

GridMap GridMap::doubling(const measure::MeasureSpace& source,
                          const measure::MeasureSpace& target) {
    if (source.atom_count() != 0 || target.atom_count() != 0)
        throw std::invalid_argument("doubling map is defined on diffuse grids");
    if (source.cell_count() != 2 * target.cell_count())
        throw std::invalid_argument(
            "doubling needs a source grid twice as fine as the target");
    GridMap m;
    m.cell_targets.resize(source.cell_count());
    for (std::size_t k = 0; k < source.cell_count(); ++k)
        m.cell_targets[k] = {false, k % target.cell_count()};
    return m;
}

measure::GridFunction weighted_pushforward_lebesgue(
    const GridMap& phi, const measure::GridFunction& u, double q,
    const measure::MeasureSpace& source, const measure::MeasureSpace& target) {
    if (!(q >= 1.0)) throw std::invalid_argument("q must be >= 1");
    u.check_shape(source);
    if (phi.atom_targets.size() != source.atom_count() ||
        phi.cell_targets.size() != source.cell_count())
        throw std::invalid_argument("grid map shape does not match the source");

    auto target_mass = [&](const GridMap::Target& t) {
        return t.is_atom ? target.atom_mass(t.index) : target.cell_mass(t.index);
    };
    auto check_target = [&](const GridMap::Target& t) {
        if (t.is_atom ? t.index >= target.atom_count()
                      : t.index >= target.cell_count())
            throw std::invalid_argument("grid map target out of range");
    };

    // nonsingularity: positive-mass source elements may not land on
    // zero-mass targets
    std::string offending;
    int bad = 0;
    for (std::size_t i = 0; i < source.atom_count(); ++i) {
        check_target(phi.atom_targets[i]);
        if (source.atom_mass(i) > 0.0 && target_mass(phi.atom_targets[i]) == 0.0) {
            if (bad < 4) offending += " atom:" + source.atoms()[i].label;
            ++bad;
        }
    }
    for (std::size_t k = 0; k < source.cell_count(); ++k) {
        check_target(phi.cell_targets[k]);
        if (source.cell_mass(k) > 0.0 && target_mass(phi.cell_targets[k]) == 0.0) {
            if (bad < 4) offending += " cell:" + std::to_string(k);
            ++bad;
        }
    }
    if (bad > 0)
        throw std::invalid_argument(
            "nonsingularity violated by " + std::to_string(bad) +
            " source elements:" + offending);

    std::vector<double> mu_q_atoms(target.atom_count(), 0.0);
    std::vector<double> mu_q_cells(target.cell_count(), 0.0);
    for (std::size_t i = 0; i < source.atom_count(); ++i) {
        const auto& t = phi.atom_targets[i];
        const double m = std::pow(std::abs(u.atom_values[i]), q) * source.atom_mass(i);
        (t.is_atom ? mu_q_atoms[t.index] : mu_q_cells[t.index]) += m;
    }
    for (std::size_t k = 0; k < source.cell_count(); ++k) {
        const auto& t = phi.cell_targets[k];
        const double m = std::pow(std::abs(u.cell_values[k]), q) * source.cell_mass(k);
        (t.is_atom ? mu_q_atoms[t.index] : mu_q_cells[t.index]) += m;
    }

    auto F = measure::GridFunction::zero(target);
    for (std::size_t i = 0; i < target.atom_count(); ++i)
        if (target.atom_mass(i) > 0.0)
            F.atom_values[i] = std::pow(mu_q_atoms[i] / target.atom_mass(i), 1.0 / q);
    for (std::size_t k = 0; k < target.cell_count(); ++k)
        if (target.cell_mass(k) > 0.0)
            F.cell_values[k] = std::pow(mu_q_cells[k] / target.cell_mass(k), 1.0 / q);
    return F;
}

BoundEstimate wco_essnorm(const GridMap& phi, const measure::GridFunction& u,
                          const ExponentQuad& quad,
                          const measure::MeasureSpace& source,
                          const measure::MeasureSpace& target) {
    if (!(quad.inv_r > 0.0))
        throw std::invalid_argument("weighted composition formula requires p > q");
    const auto F = weighted_pushforward_lebesgue(phi, u, quad.q.value(), source,
                                                 target);
    const double v = measure::lp_norm(measure::diffuse_part(F, target),
                                      Exponent(quad.r()), target);
    return BoundEstimate(v, v, "pushforward density on the target diffuse part",
                         "Theorem 5.4");
}

namespace {

double weighted_norm(const std::vector<double>& x, const std::vector<double>& w,
                     double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += w[i] * std::pow(std::abs(x[i]), p);
    return std::pow(s, 1.0 / p);
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

AscentResult operator_norm_ascent(const Matrix& K, const ExponentQuad& quad,
                                  const std::vector<double>& w_src,
                                  const std::vector<double>& w_dst,
                                  const AscentOptions& opt) {
    if (quad.p.is_infinite() || quad.q.is_infinite())
        throw std::invalid_argument("ascent supports finite exponents only");
    if (w_src.size() != K.cols || w_dst.size() != K.rows)
        throw std::invalid_argument("weight/matrix shape mismatch");
    const double p = quad.p.value(), q = quad.q.value();
    const double p_star_m1 = p > 1.0 ? 1.0 / (p - 1.0) : 0.0;  // p*-1

    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t r = 0; r < K.rows; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < K.cols; ++c) s += K.at(r, c) * x[c];
            y[r] = s;
        }
    };
    auto apply_t = [&](const std::vector<double>& y, std::vector<double>& z) {
        for (std::size_t c = 0; c < K.cols; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < K.rows; ++r) s += K.at(r, c) * y[r];
            z[c] = s;
        }
    };

    AscentResult res;
    Xoshiro256pp rng(opt.seed);
    std::vector<double> x(K.cols), y(K.rows), g(K.rows), z(K.cols);

    for (int s0 = 0; s0 < opt.starts; ++s0) {
        if (s0 == 0) {
            std::fill(x.begin(), x.end(), 1.0);
        } else if (s0 == 1) {
            // best single coordinate
            std::size_t arg = 0;
            double best = -1.0;
            for (std::size_t c = 0; c < K.cols; ++c) {
                if (w_src[c] <= 0.0) continue;
                double s = 0.0;
                for (std::size_t r = 0; r < K.rows; ++r)
                    s += w_dst[r] * std::pow(std::abs(K.at(r, c)), q);
                const double val = std::pow(s, 1.0 / q) / std::pow(w_src[c], 1.0 / p);
                if (val > best) {
                    best = val;
                    arg = c;
                }
            }
            std::fill(x.begin(), x.end(), 0.0);
            x[arg] = 1.0;
        } else {
            for (auto& v : x) v = rng.uniform();
        }
        // project away zero-weight coordinates (they carry no p-norm)
        for (std::size_t c = 0; c < K.cols; ++c)
            if (w_src[c] <= 0.0) x[c] = 0.0;
        double nx = weighted_norm(x, w_src, p);
        if (nx == 0.0) continue;
        for (auto& v : x) v /= nx;

        double best = 0.0, prev = -1.0;
        bool conv = false;
        for (int it = 0; it < opt.max_iters; ++it) {
            apply(x, y);
            const double val = weighted_norm(y, w_dst, q);
            best = std::max(best, val);
            if (val == 0.0) break;
            if (prev >= 0.0 && std::abs(val - prev) <= opt.tol * std::max(1.0, val)) {
                conv = true;
                break;
            }
            prev = val;
            // norming functional of Kx in the plain pairing, then pull back
            for (std::size_t r = 0; r < K.rows; ++r)
                g[r] = w_dst[r] * sgn(y[r]) * std::pow(std::abs(y[r]), q - 1.0);
            apply_t(g, z);
            if (p == 1.0) {
                std::size_t arg = 0;
                double bestz = -1.0;
                for (std::size_t c = 0; c < K.cols; ++c) {
                    if (w_src[c] <= 0.0) continue;
                    const double v = std::abs(z[c]) / w_src[c];
                    if (v > bestz) {
                        bestz = v;
                        arg = c;
                    }
                }
                std::fill(x.begin(), x.end(), 0.0);
                x[arg] = sgn(z[arg]) / w_src[arg];
            } else {
                for (std::size_t c = 0; c < K.cols; ++c)
                    x[c] = w_src[c] > 0.0
                               ? sgn(z[c]) *
                                     std::pow(std::abs(z[c]) / w_src[c], p_star_m1)
                               : 0.0;
            }
            nx = weighted_norm(x, w_src, p);
            if (nx == 0.0) break;
            for (auto& v : x) v /= nx;
        }
        res.history.push_back(best);
        res.lower_bound = std::max(res.lower_bound, best);
        res.converged = res.converged || conv;
    }
    return res;
}

double compact_subtraction_norm(const measure::GridFunction& u,
                                const ExponentQuad& quad,
                                const measure::MeasureSpace& space,
                                std::size_t N) {
    if (!(quad.inv_r > 0.0))
        throw std::invalid_argument("requires p > q");
    measure::GridFunction tail = u;
    for (std::size_t i = 0; i < std::min(N, tail.atom_values.size()); ++i)
        tail.atom_values[i] = {0.0, 0.0};
    return measure::lp_norm(tail, Exponent(quad.r()), space);
}

}  // namespace essnorm::ops
