#include "essnorm/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "essnorm/fft.hpp"
#include "essnorm/kernels.hpp"
#include "essnorm/parse_util.hpp"

namespace essnorm::hardy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFloor = 1e-8;  // zero-clamping floor for boundary moduli

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate_dims(const std::vector<std::size_t>& dims) {
    if (dims.empty() || dims.size() > 3)
        throw std::invalid_argument("grid must have 1..3 axes");
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (!is_power_of_two(d))
            throw std::invalid_argument("grid sizes must be powers of two");
        total *= d;
    }
    if (total > (std::size_t{1} << 24))
        throw std::invalid_argument("grid exceeds 2^24 points");
}

// Signed frequency representative of array index j on an axis of size n:
// indices above n/2 represent negative frequencies.
int signed_freq(std::size_t j, std::size_t n) {
    return j < n / 2 ? static_cast<int>(j)
                     : static_cast<int>(j) - static_cast<int>(n);
}

std::size_t wrap_index(int k, std::size_t n) {
    long m = static_cast<long>(k) % static_cast<long>(n);
    if (m < 0) m += static_cast<long>(n);
    return static_cast<std::size_t>(m);
}

}  // namespace

std::size_t CircleGridFunction::total() const {
    if (dims.empty()) return 0;
    std::size_t t = 1;
    for (std::size_t d : dims) t *= d;
    return t;
}

double CircleGridFunction::theta(int axis, std::size_t j) const {
    return kTwoPi * static_cast<double>(j) / static_cast<double>(dims[axis]);
}

CircleGridFunction CircleGridFunction::constant(std::vector<std::size_t> dims,
                                                std::complex<double> c) {
    validate_dims(dims);
    CircleGridFunction f;
    f.dims = std::move(dims);
    f.values.assign(f.total(), c);
    return f;
}

CircleGridFunction CircleGridFunction::sample(
    std::vector<std::size_t> dims,
    const std::function<std::complex<double>(const std::vector<double>&)>& fn) {
    validate_dims(dims);
    CircleGridFunction f;
    f.dims = std::move(dims);
    f.values.resize(f.total());
    const int n_axes = f.axes();
    std::vector<double> thetas(n_axes);
    std::vector<std::size_t> idx(n_axes, 0);
    for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
        std::size_t rem = flat;
        for (int a = n_axes - 1; a >= 0; --a) {
            idx[a] = rem % f.dims[a];
            rem /= f.dims[a];
        }
        for (int a = 0; a < n_axes; ++a) thetas[a] = f.theta(a, idx[a]);
        f.values[flat] = fn(thetas);
    }
    return f;
}

void CircleGridFunction::check_compatible(const CircleGridFunction& other) const {
    if (dims != other.dims)
        throw std::invalid_argument("circle grid dimensions differ");
}

bool FrequencyPolynomial::analytic() const {
    for (const auto& [k, c] : coeffs) {
        (void)c;
        for (int a = 0; a < axes; ++a)
            if (k[a] < 0) return false;
    }
    return true;
}

int FrequencyPolynomial::min_frequency(int axis) const {
    int m = 0;
    for (const auto& [k, c] : coeffs) {
        (void)c;
        m = std::min(m, k[axis]);
    }
    return m;
}

int FrequencyPolynomial::max_frequency(int axis) const {
    int m = 0;
    for (const auto& [k, c] : coeffs) {
        (void)c;
        m = std::max(m, k[axis]);
    }
    return m;
}

FrequencyPolynomial FrequencyPolynomial::shifted(
    const std::array<int, 3>& delta) const {
    FrequencyPolynomial out;
    out.axes = axes;
    for (const auto& [k, c] : coeffs) {
        std::array<int, 3> nk = k;
        for (int a = 0; a < axes; ++a) nk[a] += delta[a];
        out.coeffs[nk] = c;
    }
    return out;
}

std::complex<double> FrequencyPolynomial::eval_at(
    const std::vector<double>& thetas) const {
    if (static_cast<int>(thetas.size()) != axes)
        throw std::invalid_argument("eval_at arity mismatch");
    std::complex<double> s{0.0, 0.0};
    for (const auto& [k, c] : coeffs) {
        double phase = 0.0;
        for (int a = 0; a < axes; ++a) phase += k[a] * thetas[a];
        s += c * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return s;
}

CircleGridFunction FrequencyPolynomial::evaluate(
    const std::vector<std::size_t>& dims) const {
    validate_dims(dims);
    if (static_cast<int>(dims.size()) != axes)
        throw std::invalid_argument("evaluate arity mismatch");
    CircleGridFunction f;
    f.dims = dims;
    f.values.assign(f.total(), {0.0, 0.0});
    for (const auto& [k, c] : coeffs) {
        std::size_t flat = 0;
        for (int a = 0; a < axes; ++a) flat = flat * dims[a] + wrap_index(k[a], dims[a]);
        f.values[flat] += c;
    }
    fft::transform_nd(f.values, f.dims, /*inverse=*/true);
    // inverse FFT divides by the grid size; coefficients are amplitudes
    const double scale = static_cast<double>(f.total());
    for (auto& v : f.values) v *= scale;
    return f;
}

double FrequencyPolynomial::l2_norm() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs) {
        (void)k;
        s += std::norm(c);
    }
    return std::sqrt(s);
}

double hp_norm(const CircleGridFunction& f, Exponent p) {
    const std::size_t n = f.total();
    if (p.is_infinite()) {
        double m = 0.0;
        for (const auto& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double pv = p.value();
    const double s = kern::weighted_abs_pow_sum(f.values.data(), nullptr, n, pv);
    return std::pow(s / static_cast<double>(n), 1.0 / pv);
}

std::vector<std::complex<double>> fourier_coefficients(const CircleGridFunction& f) {
    std::vector<std::complex<double>> c = f.values;
    fft::transform_nd(c, f.dims, /*inverse=*/false);
    const double inv = 1.0 / static_cast<double>(f.total());
    for (auto& v : c) v *= inv;
    return c;
}

double analytic_residual(const CircleGridFunction& f) {
    const auto c = fourier_coefficients(f);
    double neg = 0.0, tot = 0.0;
    std::vector<std::size_t> idx(f.dims.size(), 0);
    for (std::size_t flat = 0; flat < c.size(); ++flat) {
        std::size_t rem = flat;
        bool negative = false;
        for (int a = static_cast<int>(f.dims.size()) - 1; a >= 0; --a) {
            idx[a] = rem % f.dims[a];
            rem /= f.dims[a];
        }
        for (std::size_t a = 0; a < f.dims.size(); ++a)
            if (signed_freq(idx[a], f.dims[a]) < 0) negative = true;
        const double e = std::norm(c[flat]);
        tot += e;
        if (negative) neg += e;
    }
    return tot > 0.0 ? neg / tot : 0.0;
}

OuterResult outer_with_modulus(const CircleGridFunction& G) {
    if (G.axes() != 1)
        throw std::invalid_argument("outer functions are built on 1-axis grids");
    const std::size_t n = G.total();
    OuterResult res;

    std::vector<double> mod(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = G.values[i].real();
        if (!std::isfinite(v) || !std::isfinite(G.values[i].imag()))
            throw std::invalid_argument("boundary modulus must be finite");
        if (v < kFloor) res.clamped = true;
        mod[i] = std::max(v, kFloor);
    }

    // log-modulus, then the analytic completion l + iH(l) via the frequency
    // multiplier: keep k=0, double k in (0, n/2), drop k in (n/2, n).
    std::vector<std::complex<double>> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::log(mod[i]);
    fft::transform_nd(u, G.dims, false);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == 0 || j == n / 2) continue;  // DC and Nyquist stay, factor 1,
                                             // so Re(u) = log G exactly
        if (j < n / 2)
            u[j] *= 2.0;
        else
            u[j] = {0.0, 0.0};
    }
    fft::transform_nd(u, G.dims, true);

    res.g.dims = G.dims;
    res.g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.g.values[i] = std::exp(u[i]);

    for (std::size_t i = 0; i < n; ++i)
        res.modulus_error =
            std::max(res.modulus_error, std::abs(std::abs(res.g.values[i]) - mod[i]));
    res.analytic_residual = analytic_residual(res.g);
    return res;
}

ExtremizerResult holder_extremizer(const CircleGridFunction& F, double s) {
    if (!(s > 1.0)) throw std::invalid_argument("extremizer needs s > 1");
    const std::size_t n = F.total();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = F.values[i].real();
        if (f[i] < 0.0 || !std::isfinite(f[i]))
            throw std::invalid_argument("extremizer input must be nonnegative");
    }
    ExtremizerResult res;
    res.G.dims = F.dims;
    res.G.values.assign(n, {1.0, 0.0});

    const double norm_s =
        std::pow(kern::pow_sum(f.data(), n, s) / static_cast<double>(n), 1.0 / s);
    if (norm_s == 0.0) {
        res.value = 0.0;
        return res;
    }
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::pow(f[i] / norm_s, s - 1.0);
    // kill rounding drift in the normalization ||G||_{s*} = 1
    const double s_star = s / (s - 1.0);
    const double gn = std::pow(
        kern::pow_sum(g.data(), n, s_star) / static_cast<double>(n), 1.0 / s_star);
    double pairing = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        g[i] /= gn;
        res.G.values[i] = g[i];
        pairing += f[i] * g[i];
    }
    res.value = pairing / static_cast<double>(n);
    return res;
}

SupRealization superinner_sup_realize(const CircleGridFunction& F,
                                      const ExponentQuad& quad) {
    if (!(quad.inv_s > 0.0))
        throw std::invalid_argument("sup realization requires p > q");
    const std::size_t n = F.total();
    const double q = quad.q.value();
    SupRealization res;

    CircleGridFunction G;
    if (quad.p.is_infinite()) {
        // s = 1: the extremizer is the constant 1 (unit ball of L^inf)
        G = CircleGridFunction::constant(F.dims, 1.0);
    } else {
        G = holder_extremizer(F, quad.s()).G;
    }
    CircleGridFunction mod;
    mod.dims = F.dims;
    mod.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        mod.values[i] = std::pow(G.values[i].real(), 1.0 / q);
    auto outer = outer_with_modulus(mod);
    res.g = std::move(outer.g);
    res.clamped = outer.clamped;
    res.g_norm_p = hp_norm(res.g, quad.p);

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += F.values[i].real() * std::pow(std::abs(res.g.values[i]), q);
    res.value = acc / static_cast<double>(n);
    return res;
}

FrequencyPolynomial fejer_approx(const CircleGridFunction& f, int degree) {
    if (degree < 1) throw std::invalid_argument("Fejer degree must be >= 1");
    for (std::size_t d : f.dims)
        if (static_cast<std::size_t>(degree) >= d / 2)
            throw std::invalid_argument(
                "Fejer degree must be below half the grid size");
    const auto c = fourier_coefficients(f);
    FrequencyPolynomial out;
    out.axes = f.axes();

    const int K = degree;
    std::array<int, 3> k{0, 0, 0};
    std::function<void(int, double, std::size_t)> rec = [&](int axis, double damp,
                                                            std::size_t flat) {
        if (axis == out.axes) {
            const std::complex<double> v = c[flat] * damp;
            if (std::abs(v) > 0.0) out.coeffs[k] = v;
            return;
        }
        const std::size_t n = f.dims[axis];
        for (int kk = -K; kk <= K; ++kk) {
            k[axis] = kk;
            const double w = 1.0 - std::abs(kk) / static_cast<double>(K + 1);
            rec(axis + 1, damp * w, flat * n + wrap_index(kk, n));
        }
    };
    rec(0, 1.0, 0);
    return out;
}

ShiftWitness analytic_shift_witness(const CircleGridFunction& F,
                                    const ExponentQuad& quad, int fejer_degree,
                                    int shift) {
    if (!quad.t.has_value())
        throw std::invalid_argument("shift witness requires finite p > q");
    const double t = *quad.t;
    const std::size_t n = F.total();

    CircleGridFunction G;
    G.dims = F.dims;
    G.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        G.values[i] = std::pow(std::abs(F.values[i]), t);

    FrequencyPolynomial Q = fejer_approx(G, fejer_degree);
    int d = 0;
    for (int a = 0; a < Q.axes; ++a) d = std::max(d, -Q.min_frequency(a));

    std::array<int, 3> delta{0, 0, 0};
    for (int a = 0; a < Q.axes; ++a) delta[a] = d;
    delta[0] += shift;

    ShiftWitness res;
    res.monomial_shift = d;
    res.E = Q.shifted(delta);

    const CircleGridFunction Eg = res.E.evaluate(F.dims);
    std::vector<double> fe(n), e(n);
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = std::abs(Eg.values[i]);
        fe[i] = std::abs(F.values[i]) * e[i];
    }
    const double q = quad.q.value(), p = quad.p.value();
    const double num =
        std::pow(kern::pow_sum(fe.data(), n, q) / static_cast<double>(n), 1.0 / q);
    const double den =
        std::pow(kern::pow_sum(e.data(), n, p) / static_cast<double>(n), 1.0 / p);
    res.ratio = den > 0.0 ? num / den : 0.0;
    return res;
}

PeakingResult peaking_sequence(const CircleGridFunction& F, double eps, int count) {
    const std::size_t n = F.total();
    if (count < 1) throw std::invalid_argument("peaking count must be >= 1");
    double sup = 0.0;
    for (const auto& v : F.values) sup = std::max(sup, std::abs(v));
    if (!(sup > 0.0)) throw std::invalid_argument("peaking needs ||F||_inf > 0");
    if (!(eps > 0.0) || eps >= std::min(0.25, sup))
        throw std::invalid_argument("peaking needs 0 < eps < min(1/4, ||F||_inf)");

    // superlevel set as grid cells
    std::vector<std::size_t> super;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(F.values[i]) >= sup - eps) super.push_back(i);
    if (super.empty())
        throw std::runtime_error("peaking: superlevel set has zero grid mass");

    // nested levels at ratio 1/4
    std::vector<std::vector<std::size_t>> levels;
    levels.push_back(super);
    for (int l = 1; l < count; ++l) {
        const std::size_t prev = levels.back().size();
        const std::size_t next = prev / 4;
        if (next == 0)
            throw std::runtime_error(
                "peaking: superlevel set too small to nest " + std::to_string(count) +
                " levels at ratio 1/4 (level " + std::to_string(l) + " empty)");
        levels.emplace_back(levels.back().begin(), levels.back().begin() + next);
    }

    PeakingResult res;
    res.report.outside_bound = 4.0 * eps;
    std::vector<std::vector<char>> masks(count, std::vector<char>(n, 0));

    for (int l = 0; l < count; ++l) {
        for (std::size_t i : levels[l]) masks[l][i] = 1;
        const double mass = static_cast<double>(levels[l].size()) / n;
        res.level_masses.push_back(mass);
        const double height = 1.0 / mass;

        CircleGridFunction h;
        h.dims = F.dims;
        h.values.assign(n, {0.0, 0.0});
        for (std::size_t i : levels[l]) h.values[i] = height;

        // grid Egorov selection: smallest scheduled degree whose deviation
        // exceeds eps only on cells of total mass <= eps * mu(A_l)
        const std::size_t min_dim =
            *std::min_element(F.dims.begin(), F.dims.end());
        int chosen = -1;
        CircleGridFunction Qg;
        for (int K = 16; static_cast<std::size_t>(K) < min_dim / 2; K *= 2) {
            Qg = fejer_approx(h, K).evaluate(F.dims);
            std::size_t bad = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double target = masks[l][i] ? height : 0.0;
                if (std::abs(Qg.values[i].real() - target) > eps) ++bad;
            }
            if (static_cast<double>(bad) / n <= eps * mass) {
                chosen = K;
                break;
            }
        }
        if (chosen < 0)
            throw std::runtime_error(
                "peaking: no Fejer degree below grid/2 meets the Egorov criterion "
                "at level " + std::to_string(l) +
                " (mass " + std::to_string(mass) + "); refine the grid");
        res.degrees.push_back(chosen);

        // analytic version: shift every axis by the degree used
        CircleGridFunction R;
        R.dims = F.dims;
        R.values.resize(n);
        std::vector<std::size_t> idx(F.dims.size(), 0);
        for (std::size_t flat = 0; flat < n; ++flat) {
            std::size_t rem = flat;
            double phase = 0.0;
            for (int a = static_cast<int>(F.dims.size()) - 1; a >= 0; --a) {
                idx[a] = rem % F.dims[a];
                rem /= F.dims[a];
            }
            for (std::size_t a = 0; a < F.dims.size(); ++a)
                phase += chosen * (kTwoPi * idx[a] / F.dims[a]);
            R.values[flat] = std::complex<double>(std::cos(phase), std::sin(phase)) *
                             Qg.values[flat].real();
        }
        res.R.push_back(std::move(R));
    }

    // the Fact: for all m > n, integral_{A_n}|R_n - R_m| >= 1/8 and the
    // complement integral < 4 eps
    for (int a = 0; a < count; ++a) {
        double l1 = 0.0, supv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::abs(res.R[a].values[i]);
            l1 += v;
            supv = std::max(supv, v);
        }
        res.report.l1_norms.push_back(l1 / n);
        res.report.sup_values.push_back(supv);
        res.report.sup_bounds.push_back(1.0 / res.level_masses[a]);
    }
    res.report.pass = true;
    for (int a = 0; a < count; ++a) {
        for (int b = a + 1; b < count; ++b) {
            FactReport::Pair pr;
            pr.n = a;
            pr.m = b;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = std::abs(res.R[a].values[i] - res.R[b].values[i]);
                if (masks[a][i])
                    pr.inside += v;
                else
                    pr.outside += v;
            }
            pr.inside /= n;
            pr.outside /= n;
            if (!(pr.inside >= res.report.inside_bound) ||
                !(pr.outside < res.report.outside_bound))
                res.report.pass = false;
            res.report.pairs.push_back(pr);
        }
    }
    return res;
}

namespace {

FrequencyPolynomial parse_poly_body(const std::string& body) {
    FrequencyPolynomial poly;
    if (body.find('(') == std::string::npos) {
        // shorthand: 1-axis coefficients of z^0, z^1, ...
        poly.axes = 1;
        int k = 0;
        for (const auto& tok : parse::split(body, ',')) {
            if (parse::trim(tok).empty()) continue;
            const auto c = parse::parse_complex(tok);
            if (std::abs(c) > 0.0) poly.coeffs[{k, 0, 0}] = c;
            ++k;
        }
        return poly;
    }
    poly.axes = 1;
    for (const auto& term : parse::split(body, ';')) {
        const std::string t = parse::trim(term);
        if (t.empty()) continue;
        const auto close = t.find(')');
        if (t.front() != '(' || close == std::string::npos ||
            t.find('=', close) == std::string::npos)
            throw std::invalid_argument("poly term must be (k,..)=c: " + t);
        std::array<int, 3> k{0, 0, 0};
        int axis = 0;
        for (const auto& ks : parse::split(t.substr(1, close - 1), ',')) {
            if (axis >= 3) throw std::invalid_argument("at most 3 axes: " + t);
            k[axis++] = static_cast<int>(parse::parse_long(ks));
        }
        poly.axes = std::max(poly.axes, axis);
        poly.coeffs[k] = parse::parse_complex(t.substr(t.find('=', close) + 1));
    }
    return poly;
}

}  // namespace

CircleGridFunction parse_circle_function(const std::string& spec,
                                         const std::vector<std::size_t>& dims) {
    const std::string s = parse::trim(spec);
    if (parse::starts_with(s, "const")) {
        return CircleGridFunction::constant(dims, parse::parse_complex(s.substr(5)));
    }
    if (parse::starts_with(s, "poly:")) {
        auto poly = parse_poly_body(s.substr(5));
        if (poly.axes != static_cast<int>(dims.size()))
            poly.axes = static_cast<int>(dims.size());
        return poly.evaluate(dims);
    }
    if (parse::starts_with(s, "abs-of-poly:")) {
        auto poly = parse_poly_body(s.substr(12));
        if (poly.axes != static_cast<int>(dims.size()))
            poly.axes = static_cast<int>(dims.size());
        auto f = poly.evaluate(dims);
        for (auto& v : f.values) v = std::abs(v);
        return f;
    }
    if (parse::starts_with(s, "csv:")) {
        const auto text = parse::read_file(s.substr(4));
        CircleGridFunction f;
        f.dims = dims;
        f.values.reserve(1);
        for (const auto& tok : parse::split(text, ',')) {
            if (parse::trim(tok).empty()) continue;
            f.values.push_back(parse::parse_complex(tok));
        }
        std::size_t total = 1;
        for (auto d : dims) total *= d;
        if (f.values.size() != total)
            throw std::invalid_argument("csv length does not match the grid");
        return f;
    }
    throw std::invalid_argument("unknown function spec: " + spec);
}

std::function<std::complex<double>(double)> parse_boundary_function(
    const std::string& spec) {
    const std::string s = parse::trim(spec);
    if (parse::starts_with(s, "const")) {
        const auto c = parse::parse_complex(s.substr(5));
        return [c](double) { return c; };
    }
    if (parse::starts_with(s, "poly:") || parse::starts_with(s, "abs-of-poly:")) {
        const bool take_abs = parse::starts_with(s, "abs-of-poly:");
        auto poly = parse_poly_body(s.substr(s.find(':') + 1));
        if (poly.axes != 1)
            throw std::invalid_argument("boundary functions live on one axis");
        return [poly, take_abs](double theta) -> std::complex<double> {
            const auto v = poly.eval_at({theta});
            return take_abs ? std::complex<double>(std::abs(v), 0.0) : v;
        };
    }
    if (parse::starts_with(s, "csv:")) {
        const auto text = parse::read_file(s.substr(4));
        std::vector<std::complex<double>> values;
        for (const auto& tok : parse::split(text, ',')) {
            if (parse::trim(tok).empty()) continue;
            values.push_back(parse::parse_complex(tok));
        }
        if (values.empty())
            throw std::invalid_argument("empty csv boundary function");
        // nearest-node lookup on whatever length the file provided
        return [values](double theta) {
            double t = std::fmod(theta, kTwoPi);
            if (t < 0) t += kTwoPi;
            const std::size_t j = static_cast<std::size_t>(
                                      std::lround(t / kTwoPi * values.size())) %
                                  values.size();
            return values[j];
        };
    }
    throw std::invalid_argument("unknown function spec: " + spec);
}

}  // namespace essnorm::hardy
