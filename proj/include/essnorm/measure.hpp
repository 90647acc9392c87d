#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "essnorm/exponents.hpp"

// Finite model of a sigma-finite separable measure space: a list of atoms
// plus a diffuse part discretized on 2^m uniform cells of [0,1). Dyadic
// conditional expectations play the role of the approximating filtration, and
// the sign-witness construction realizes the weak-null sequences from the
// multiplier lower bounds.

namespace essnorm::measure {

struct Atom {
    std::string label;
    double mass = 0.0;
};

class MeasureSpace {
public:
    /// density has 2^level entries; every atom mass must be > 0, every
    /// density value >= 0 and finite.
    MeasureSpace(std::vector<Atom> atoms, std::vector<double> density);

    static MeasureSpace lebesgue(int level);
    static MeasureSpace atoms_only(std::vector<Atom> atoms);

    /// Text format: `atoms: label=mass, ...; diffuse: m=<level>, density=<expr>`
    /// where expr is a number, `x`, `x^<k>`, or `csv:<path>`. Either section
    /// may be omitted.
    static MeasureSpace parse(const std::string& spec);

    std::size_t atom_count() const { return atoms_.size(); }
    std::size_t cell_count() const { return density_.size(); }
    int level() const { return level_; }
    double cell_width() const { return cell_width_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<double>& density() const { return density_; }

    double atom_mass(std::size_t i) const { return atoms_[i].mass; }
    double cell_mass(std::size_t i) const { return cell_width_ * density_[i]; }
    /// Midpoint coordinate of cell i.
    double cell_center(std::size_t i) const {
        return (static_cast<double>(i) + 0.5) * cell_width_;
    }

    double atomic_mass() const;
    double diffuse_mass() const;
    double total_mass() const { return atomic_mass() + diffuse_mass(); }

private:
    std::vector<Atom> atoms_;
    std::vector<double> density_;
    int level_ = 0;
    double cell_width_ = 1.0;
};

/// A measurable function on the space: one complex value per atom and per
/// diffuse cell.
struct GridFunction {
    std::vector<std::complex<double>> atom_values;
    std::vector<std::complex<double>> cell_values;

    static GridFunction zero(const MeasureSpace& space);
    static GridFunction constant(const MeasureSpace& space, std::complex<double> c);
    /// Sample f at the atom labels' values (unused, zero) and cell midpoints.
    template <typename F>
    static GridFunction on_cells(const MeasureSpace& space, F&& f) {
        GridFunction g = zero(space);
        for (std::size_t i = 0; i < space.cell_count(); ++i)
            g.cell_values[i] = f(space.cell_center(i));
        return g;
    }

    void check_shape(const MeasureSpace& space) const;
};

/// (sum_atoms |f|^p mass + width * sum_cells |f|^p density)^(1/p);
/// max modulus over the support for p = inf.
double lp_norm(const GridFunction& f, Exponent p, const MeasureSpace& space);

/// Integral of f against the measure (compensated summation).
std::complex<double> integral(const GridFunction& f, const MeasureSpace& space);

/// Dyadic algebra at `level` n <= m: cells grouped into 2^n blocks, atoms kept
/// as atoms of the algebra.
struct DyadicAlgebra {
    int level = 0;
};

/// Blockwise mu-weighted averages on the diffuse part; identity on atoms.
/// Zero-mass blocks map to 0. Contraction in every L^q, idempotent, and equal
/// to f at level m.
GridFunction conditional_expectation(const GridFunction& f, DyadicAlgebra alg,
                                     const MeasureSpace& space);

/// Fractional subset of the diffuse cells: fraction[i] in [0,1] is the
/// portion of cell i belonging to the set. Realizes exact halving by
/// fractionally assigning one boundary cell.
struct CellSet {
    std::vector<double> fraction;

    static CellSet all(const MeasureSpace& space);
    static CellSet none(const MeasureSpace& space);
    double weighted_integral(const std::vector<double>& weight_per_cell,
                             const MeasureSpace& space) const;
};

struct HalvingResult {
    CellSet half1;
    CellSet half2;
    bool degenerate = false;  // zero total weight: (cells, empty)
};

/// Split `cells` into two fractional halves with equal integral of
/// weight d(mu), scanning left to right; the crossing cell is split
/// fractionally so the two integrals agree to machine precision.
/// weight_per_cell must be nonnegative.
HalvingResult halving_split(const CellSet& cells,
                            const std::vector<double>& weight_per_cell,
                            const MeasureSpace& space);

/// The weak-null witness g_n at dyadic level n for a multiplier u with
/// p > q (p finite): |g_n| = |u|^(r/p) on the diffuse part, 0 on atoms, and
/// every level-n dyadic block satisfies integral(g_n) = 0 exactly.
///
/// `signed_values` stores, on each fractionally split boundary cell, the
/// mass-weighted net value (2a-1)|u|^(r/p) so that plain cell-sum integration
/// is exact; `modulus` carries the true |u|^(r/p) everywhere and is the field
/// norms must be computed from.
struct SignWitness {
    GridFunction signed_values;
    GridFunction modulus;
    int level = 0;
    std::vector<double> block_integrals;  // diagnostics, ~0 by construction
};

SignWitness sign_witness(const GridFunction& u, const ExponentQuad& quad,
                         int level, const MeasureSpace& space);

/// The p = inf variant: |g_n| = 1 on the diffuse part, blocks split so that
/// the halves carry equal integral of |u| d(mu). For real nonnegative u this
/// makes integral(u * g_n) vanish on every level-n block.
SignWitness sign_witness_uniform(const GridFunction& u, int level,
                                 const MeasureSpace& space);

/// u_N: agrees with u on the first N atoms, 0 elsewhere.
GridFunction tail_truncation(const GridFunction& u, std::size_t N,
                             const MeasureSpace& space);

/// Pointwise |f| as a real-valued GridFunction.
GridFunction modulus_of(const GridFunction& f);
/// Pointwise product.
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b);
/// Restriction of u to the diffuse part (atoms zeroed).
GridFunction diffuse_part(const GridFunction& u, const MeasureSpace& space);

}  // namespace essnorm::measure
