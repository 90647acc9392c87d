#include "essnorm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "essnorm/kernels.hpp"
#include "essnorm/parse_util.hpp"

namespace essnorm::measure {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_of(std::size_t n) {
    int l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return l;
}

// Complex Neumaier accumulator.
struct CompensatedComplex {
    double re = 0, re_c = 0, im = 0, im_c = 0;
    void add(std::complex<double> z) {
        add_part(re, re_c, z.real());
        add_part(im, im_c, z.imag());
    }
    std::complex<double> value() const { return {re + re_c, im + im_c}; }

private:
    static void add_part(double& sum, double& comp, double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
};

}  // namespace

MeasureSpace::MeasureSpace(std::vector<Atom> atoms, std::vector<double> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
    for (const auto& a : atoms_) {
        if (!(a.mass > 0.0) || !std::isfinite(a.mass))
            throw std::invalid_argument("atom '" + a.label +
                                        "' must have positive finite mass");
    }
    if (!density_.empty()) {
        if (!is_power_of_two(density_.size()))
            throw std::invalid_argument("diffuse cell count must be a power of two");
        for (double d : density_) {
            if (!(d >= 0.0) || !std::isfinite(d))
                throw std::invalid_argument("density values must be >= 0 and finite");
        }
        level_ = log2_of(density_.size());
        cell_width_ = 1.0 / static_cast<double>(density_.size());
    }
}

MeasureSpace MeasureSpace::lebesgue(int level) {
    if (level < 0 || level > 24) throw std::invalid_argument("level out of range");
    return MeasureSpace({}, std::vector<double>(std::size_t{1} << level, 1.0));
}

MeasureSpace MeasureSpace::atoms_only(std::vector<Atom> atoms) {
    return MeasureSpace(std::move(atoms), {});
}

double MeasureSpace::atomic_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass;
    return s;
}

double MeasureSpace::diffuse_mass() const {
    return cell_width_ * kern::reduce_sum(density_.data(), density_.size());
}

MeasureSpace MeasureSpace::parse(const std::string& spec) {
    std::vector<Atom> atoms;
    std::vector<double> density;
    for (const auto& section : parse::split(spec, ';')) {
        const std::string s = parse::trim(section);
        if (s.empty()) continue;
        const auto colon = s.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("measure spec section needs 'name:': " + s);
        const std::string name = parse::trim(s.substr(0, colon));
        const std::string body = parse::trim(s.substr(colon + 1));
        if (name == "atoms") {
            for (const auto& item : parse::split(body, ',')) {
                const std::string it = parse::trim(item);
                if (it.empty()) continue;
                const auto eq = it.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("atom needs label=mass: " + it);
                atoms.push_back({parse::trim(it.substr(0, eq)),
                                 parse::parse_double(it.substr(eq + 1))});
            }
        } else if (name == "diffuse") {
            int level = -1;
            std::string expr;
            for (const auto& item : parse::split(body, ',')) {
                const std::string it = parse::trim(item);
                if (it.empty()) continue;
                const auto eq = it.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("diffuse needs key=value: " + it);
                const std::string key = parse::trim(it.substr(0, eq));
                const std::string val = parse::trim(it.substr(eq + 1));
                if (key == "m")
                    level = static_cast<int>(parse::parse_long(val));
                else if (key == "density")
                    expr = val;
                else
                    throw std::invalid_argument("unknown diffuse key: " + key);
            }
            if (level < 0) throw std::invalid_argument("diffuse needs m=<level>");
            const std::size_t n = std::size_t{1} << level;
            density.assign(n, 1.0);
            if (!expr.empty() && expr != "1") {
                if (parse::starts_with(expr, "csv:")) {
                    const auto text = parse::read_file(expr.substr(4));
                    std::size_t i = 0;
                    for (const auto& tok : parse::split(text, ',')) {
                        if (parse::trim(tok).empty()) continue;
                        if (i >= n)
                            throw std::invalid_argument("density csv longer than grid");
                        density[i++] = parse::parse_double(tok);
                    }
                    if (i != n)
                        throw std::invalid_argument("density csv shorter than grid");
                } else if (expr == "x") {
                    for (std::size_t i = 0; i < n; ++i)
                        density[i] = (static_cast<double>(i) + 0.5) / n;
                } else if (parse::starts_with(expr, "x^")) {
                    const double k = parse::parse_double(expr.substr(2));
                    for (std::size_t i = 0; i < n; ++i)
                        density[i] = std::pow((static_cast<double>(i) + 0.5) / n, k);
                } else {
                    const double c = parse::parse_double(expr);
                    density.assign(n, c);
                }
            }
        } else {
            throw std::invalid_argument("unknown measure section: " + name);
        }
    }
    return MeasureSpace(std::move(atoms), std::move(density));
}

GridFunction GridFunction::zero(const MeasureSpace& space) {
    GridFunction g;
    g.atom_values.assign(space.atom_count(), {0.0, 0.0});
    g.cell_values.assign(space.cell_count(), {0.0, 0.0});
    return g;
}

GridFunction GridFunction::constant(const MeasureSpace& space,
                                    std::complex<double> c) {
    GridFunction g;
    g.atom_values.assign(space.atom_count(), c);
    g.cell_values.assign(space.cell_count(), c);
    return g;
}

void GridFunction::check_shape(const MeasureSpace& space) const {
    if (atom_values.size() != space.atom_count() ||
        cell_values.size() != space.cell_count())
        throw std::invalid_argument("grid function shape does not match space");
}

double lp_norm(const GridFunction& f, Exponent p, const MeasureSpace& space) {
    f.check_shape(space);
    if (p.is_infinite()) {
        double m = 0.0;
        for (std::size_t i = 0; i < f.atom_values.size(); ++i)
            if (space.atom_mass(i) > 0.0) m = std::max(m, std::abs(f.atom_values[i]));
        for (std::size_t i = 0; i < f.cell_values.size(); ++i)
            if (space.density()[i] > 0.0) m = std::max(m, std::abs(f.cell_values[i]));
        return m;
    }
    const double pv = p.value();
    double total = 0.0;
    for (std::size_t i = 0; i < f.atom_values.size(); ++i)
        total += space.atom_mass(i) * std::pow(std::abs(f.atom_values[i]), pv);
    total += space.cell_width() *
             kern::weighted_abs_pow_sum(f.cell_values.data(), space.density().data(),
                                        f.cell_values.size(), pv);
    return std::pow(total, 1.0 / pv);
}

std::complex<double> integral(const GridFunction& f, const MeasureSpace& space) {
    f.check_shape(space);
    CompensatedComplex acc;
    for (std::size_t i = 0; i < f.atom_values.size(); ++i)
        acc.add(f.atom_values[i] * space.atom_mass(i));
    const double w = space.cell_width();
    for (std::size_t i = 0; i < f.cell_values.size(); ++i)
        acc.add(f.cell_values[i] * (w * space.density()[i]));
    return acc.value();
}

GridFunction conditional_expectation(const GridFunction& f, DyadicAlgebra alg,
                                     const MeasureSpace& space) {
    f.check_shape(space);
    if (alg.level < 0 || alg.level > space.level())
        throw std::invalid_argument("dyadic level must be in [0, m]");
    GridFunction out = f;  // atoms are atoms of the algebra
    if (space.cell_count() == 0) return out;
    const std::size_t blocks = std::size_t{1} << alg.level;
    const std::size_t per = space.cell_count() / blocks;
    for (std::size_t b = 0; b < blocks; ++b) {
        CompensatedComplex num;
        double den = 0.0;
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) {
            num.add(f.cell_values[i] * space.density()[i]);
            den += space.density()[i];
        }
        const std::complex<double> v =
            den > 0.0 ? num.value() / den : std::complex<double>{0.0, 0.0};
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) out.cell_values[i] = v;
    }
    return out;
}

CellSet CellSet::all(const MeasureSpace& space) {
    return {std::vector<double>(space.cell_count(), 1.0)};
}

CellSet CellSet::none(const MeasureSpace& space) {
    return {std::vector<double>(space.cell_count(), 0.0)};
}

double CellSet::weighted_integral(const std::vector<double>& weight_per_cell,
                                  const MeasureSpace& space) const {
    if (fraction.size() != space.cell_count() ||
        weight_per_cell.size() != space.cell_count())
        throw std::invalid_argument("cell-set/weight shape mismatch");
    double s = 0.0;
    const double w = space.cell_width();
    for (std::size_t i = 0; i < fraction.size(); ++i)
        s += fraction[i] * weight_per_cell[i] * w * space.density()[i];
    return s;
}

HalvingResult halving_split(const CellSet& cells,
                            const std::vector<double>& weight_per_cell,
                            const MeasureSpace& space) {
    if (cells.fraction.size() != space.cell_count() ||
        weight_per_cell.size() != space.cell_count())
        throw std::invalid_argument("cell-set/weight shape mismatch");
    for (double v : weight_per_cell)
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("halving weight must be nonnegative");

    const std::size_t n = space.cell_count();
    const double h = space.cell_width();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += cells.fraction[i] * weight_per_cell[i] * h * space.density()[i];

    HalvingResult res{CellSet::none(space), CellSet::none(space), false};
    if (total <= 0.0) {
        res.half1 = cells;
        res.degenerate = true;
        return res;
    }
    const double half = 0.5 * total;
    double cum = 0.0;
    bool crossed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = cells.fraction[i] * weight_per_cell[i] * h * space.density()[i];
        if (crossed) {
            res.half2.fraction[i] = cells.fraction[i];
            continue;
        }
        if (cum + w < half) {
            res.half1.fraction[i] = cells.fraction[i];
            cum += w;
        } else {
            // crossing cell: put fraction alpha of it into half1
            const double alpha = w > 0.0 ? (half - cum) / w : 0.0;
            res.half1.fraction[i] = cells.fraction[i] * alpha;
            res.half2.fraction[i] = cells.fraction[i] * (1.0 - alpha);
            crossed = true;
        }
    }
    return res;
}

namespace {

// Shared core: per level-n dyadic block, scan the given nonnegative cell
// moduli and produce signed values with one fractionally assigned crossing
// cell, so that sum(signed * cellmass) over the block cancels exactly.
// `split_weight[i]` drives the halving; `value[i]` is the witness modulus.
SignWitness build_witness(const std::vector<double>& split_weight,
                          const std::vector<double>& value, int level,
                          const MeasureSpace& space) {
    if (level < 0 || level > space.level())
        throw std::invalid_argument("witness level must be in [0, m]");
    SignWitness wit;
    wit.level = level;
    wit.signed_values = GridFunction::zero(space);
    wit.modulus = GridFunction::zero(space);
    const std::size_t n = space.cell_count();
    for (std::size_t i = 0; i < n; ++i) wit.modulus.cell_values[i] = value[i];
    if (n == 0) return wit;

    const std::size_t blocks = std::size_t{1} << level;
    const std::size_t per = n / blocks;
    const double h = space.cell_width();
    wit.block_integrals.reserve(blocks);
    std::vector<double> contrib(per);

    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = b * per;
        double total = 0.0;
        for (std::size_t i = lo; i < lo + per; ++i)
            total += split_weight[i] * h * space.density()[i];
        if (total <= 0.0) {
            // degenerate block: keep the positive sign everywhere
            for (std::size_t i = lo; i < lo + per; ++i)
                wit.signed_values.cell_values[i] = value[i];
        } else {
            const double half = 0.5 * total;
            double cum = 0.0;
            bool crossed = false;
            for (std::size_t i = lo; i < lo + per; ++i) {
                const double w = split_weight[i] * h * space.density()[i];
                double sign;
                if (crossed) {
                    sign = -1.0;
                } else if (cum + w < half) {
                    sign = 1.0;
                    cum += w;
                } else {
                    const double alpha = w > 0.0 ? (half - cum) / w : 0.0;
                    sign = 2.0 * alpha - 1.0;
                    crossed = true;
                }
                wit.signed_values.cell_values[i] = sign * value[i];
            }
        }
        // diagnostic: compensated block integral of the signed witness
        for (std::size_t i = lo; i < lo + per; ++i)
            contrib[i - lo] =
                wit.signed_values.cell_values[i].real() * h * space.density()[i];
        wit.block_integrals.push_back(kern::compensated_sum(contrib.data(), per));
    }
    return wit;
}

}  // namespace

SignWitness sign_witness(const GridFunction& u, const ExponentQuad& quad,
                         int level, const MeasureSpace& space) {
    u.check_shape(space);
    if (!(quad.inv_r > 0.0) || quad.p.is_infinite())
        throw std::invalid_argument("sign witness requires finite p > q");
    const double r_over_p = quad.p.reciprocal() / quad.inv_r;
    const std::size_t n = space.cell_count();
    std::vector<double> value(n);
    for (std::size_t i = 0; i < n; ++i)
        value[i] = std::pow(std::abs(u.cell_values[i]), r_over_p);
    // the split weight and the witness modulus coincide: |u|^(r/p)
    return build_witness(value, value, level, space);
}

SignWitness sign_witness_uniform(const GridFunction& u, int level,
                                 const MeasureSpace& space) {
    u.check_shape(space);
    const std::size_t n = space.cell_count();
    std::vector<double> weight(n), value(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) weight[i] = std::abs(u.cell_values[i]);
    return build_witness(weight, value, level, space);
}

GridFunction tail_truncation(const GridFunction& u, std::size_t N,
                             const MeasureSpace& space) {
    u.check_shape(space);
    GridFunction out = GridFunction::zero(space);
    for (std::size_t i = 0; i < std::min(N, u.atom_values.size()); ++i)
        out.atom_values[i] = u.atom_values[i];
    return out;
}

GridFunction modulus_of(const GridFunction& f) {
    GridFunction out = f;
    for (auto& v : out.atom_values) v = std::abs(v);
    for (auto& v : out.cell_values) v = std::abs(v);
    return out;
}

GridFunction pointwise_product(const GridFunction& a, const GridFunction& b) {
    if (a.atom_values.size() != b.atom_values.size() ||
        a.cell_values.size() != b.cell_values.size())
        throw std::invalid_argument("grid function shape mismatch");
    GridFunction out = a;
    for (std::size_t i = 0; i < out.atom_values.size(); ++i)
        out.atom_values[i] *= b.atom_values[i];
    for (std::size_t i = 0; i < out.cell_values.size(); ++i)
        out.cell_values[i] *= b.cell_values[i];
    return out;
}

GridFunction diffuse_part(const GridFunction& u, const MeasureSpace& space) {
    u.check_shape(space);
    GridFunction out = u;
    for (auto& v : out.atom_values) v = {0.0, 0.0};
    return out;
}

}  // namespace essnorm::measure
