#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sep/errors.hpp"

namespace sep {

struct Atom {
    double x = 0.0;
    double p = 0.0;
};

enum class PieceKind { Uniform, Pareto, PiecewiseLinearCdf };

/// One absolutely-continuous component of a target measure.
///
/// Uniform: constant density `mass/(hi-lo)` on [lo, hi].
/// Pareto: density mass * 2*shift^2 * (x - offset + 2*shift)^-3 on
///   [offset - shift, +inf); centred at `offset`, infinite variance.
///   `mirrored` reflects it to (-inf, offset + shift], centred at -offset... see
///   reflected(): mirrored pieces keep the *base* parameters and evaluate
///   through the reflection identities.
/// PiecewiseLinearCdf: knots (x_i, u_i) with u_0 = 0 <= u_i increasing <= u_k = 1
///   give the normalised CDF inside the piece; density is piecewise constant.
struct DensityPiece {
    PieceKind kind = PieceKind::Uniform;
    double lo = 0.0, hi = 0.0;
    double mass = 0.0;
    double shift = 1.0;    // pareto only
    double offset = 0.0;   // pareto only
    bool mirrored = false;  // pareto only
    std::vector<std::pair<double, double>> knots;  // plcdf only

    static DensityPiece uniform(double lo, double hi, double mass);
    static DensityPiece pareto(double shift, double mass, double offset = 0.0,
                               bool mirrored = false);
    static DensityPiece piecewise_linear_cdf(std::vector<std::pair<double, double>> knots,
                                             double mass);
};

struct StarMeasure;

/// A centred probability measure given by atoms plus density pieces, with
/// closed-form call/put/potential curves and one-sided derivatives.
/// Immutable after construction; safe to share across threads.
class TargetMeasure {
public:
    static TargetMeasure from_parts(std::vector<Atom> atoms, std::vector<DensityPiece> pieces);

    /// Same validation except the centring requirement; used for price laws
    /// that are centred only after shifting by the spot.
    static TargetMeasure from_parts_uncentred(std::vector<Atom> atoms,
                                              std::vector<DensityPiece> pieces);

    /// Breeden-Litzenberger ingestion: strictly increasing strikes with
    /// arbitrage-free prices define a piecewise-linear call curve whose slope
    /// jumps are atoms. The result is the law of X_T - spot (centred).
    static TargetMeasure from_call_prices(const std::vector<std::pair<double, double>>& quotes,
                                          double spot);

    // curves
    double call(double x) const;       // C(x) = E[(X-x)^+]
    double put(double x) const;        // P(x) = E[(x-X)^+]
    double potential(double x) const;  // U(x) = C(x) + P(x) = E|X-x|
    double call_dplus(double x) const { return -tail_gt(x); }
    double call_dminus(double x) const { return -tail_ge(x); }
    double put_dplus(double x) const { return 1.0 - tail_gt(x); }
    double put_dminus(double x) const { return 1.0 - tail_ge(x); }

    // tails and partial moments
    double tail_ge(double x) const;   // mu([x, inf))
    double tail_gt(double x) const;   // mu((x, inf))
    double cdf(double x) const { return 1.0 - tail_gt(x); }
    double cdf_left(double x) const { return 1.0 - tail_ge(x); }
    double mean_ge(double x) const;   // int_{[x,inf)} t mu(dt)
    double mean_gt(double x) const;
    double atom_at(double x) const;

    /// barycentre b(x) = E[X | X >= x] for x < sup-support, else x
    double barycentre(double x) const;
    /// reverse barycentre E[X | X <= x]; throws NoMassBelow when cdf(x) = 0
    double reverse_barycentre(double x) const;

    // summary quantities
    double mean() const { return mean_; }
    double first_abs_moment() const { return potential(0.0); }
    double variance() const;  // +inf for pareto tails
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    double mass_at_zero() const { return mass_at_zero_; }
    bool has_atoms() const { return !atoms_.empty(); }
    bool bounded() const;

    /// locations where C or P have kinks or the density jumps, sorted
    const std::vector<double>& kinks() const { return kinks_; }

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<DensityPiece>& pieces() const { return pieces_; }

    // transforms
    TargetMeasure reflected() const;         // law of -X
    TargetMeasure translated(double c) const;  // law of X + c (not centred unless c = 0)
    TargetMeasure scaled(double k) const;      // law of k*X, k > 0

    /// mu* of the paper: drop the atom at zero and rescale
    StarMeasure star() const;

private:
    TargetMeasure() = default;
    static TargetMeasure build(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                               bool require_centred);

    struct Cells {  // compiled uniform cells of one piece, with suffix sums
        std::vector<double> edge;      // n+1 edges
        std::vector<double> cmass;     // per-cell mass (n)
        std::vector<double> sufmass;   // sufmass[i] = sum_{j>=i} cmass[j] (n+1, last=0)
        std::vector<double> sufmean;   // suffix first moments
    };

    double piece_call(std::size_t i, double x) const;
    double piece_tail(std::size_t i, double x) const;
    double piece_mean_ge(std::size_t i, double x) const;
    double piece_variance(std::size_t i) const;

    std::vector<Atom> atoms_;
    std::vector<DensityPiece> pieces_;
    std::vector<Cells> cells_;
    std::vector<double> atom_sufmass_, atom_sufmean_;
    std::vector<double> kinks_;
    double mean_ = 0.0;
    double lo_ = 0.0, hi_ = 0.0;
    double mass_at_zero_ = 0.0;
};

struct StarMeasure {
    TargetMeasure measure;
    double removed_mass = 0.0;
};

/// Evaluation handle bundling the convex curves of a measure.
struct ConvexCurve {
    const TargetMeasure* m;
    double call(double x) const { return m->call(x); }
    double put(double x) const { return m->put(x); }
    double potential(double x) const { return m->potential(x); }
    double call_dplus(double x) const { return m->call_dplus(x); }
    double call_dminus(double x) const { return m->call_dminus(x); }
    double put_dplus(double x) const { return m->put_dplus(x); }
    double put_dminus(double x) const { return m->put_dminus(x); }
};

/// Sampled sufficient check for mu_a <=cx mu_b: U_a <= U_b on the grid.
/// Exact for piecewise-linear potentials when the grid contains the kinks.
bool convex_order_leq(const TargetMeasure& a, const TargetMeasure& b,
                      const std::vector<double>& grid, double tol = 1e-12);

}  // namespace sep
