#pragma once

#include <cstddef>
#include <vector>

// Time layer: a nondecreasing right-continuous clock with finitely many
// jumps, the control measure it induces together with Lebesgue time, and
// the jump-aware partitions the stepping scheme runs on.

namespace catchup {

// One polynomial piece of the clock's absolutely continuous density.
// Coefficients are in the local variable x = t - start, so evaluation and
// the closed-form antiderivative stay well conditioned on late pieces.
struct PolyPiece {
    double start = 0.0;
    std::vector<double> coeffs;  // c0 + c1*x + c2*x^2 + ...

    double eval(double t) const;
    // Antiderivative of the piece evaluated at t (zero at the piece start).
    double integral_from_start(double t) const;
};

struct ClockAtom {
    double time = 0.0;  // in (0, horizon]
    double size = 0.0;  // > 0
};

// Nondecreasing right-continuous clock on [0, T]: an absolutely continuous
// part with piecewise-polynomial nonnegative density plus finitely many
// positive jumps. Immutable after construction.
class BVClock {
public:
    BVClock(std::vector<PolyPiece> ac_pieces, std::vector<ClockAtom> atoms,
            double horizon);

    // Trivial clock (zero density, no atoms).
    static BVClock trivial(double horizon) { return BVClock({}, {}, horizon); }

    double horizon() const { return horizon_; }
    const std::vector<PolyPiece>& ac_pieces() const { return pieces_; }
    const std::vector<ClockAtom>& atoms() const { return atoms_; }

    // Density of the absolutely continuous part at t.
    double ac_density(double t) const;
    // Cumulative clock value: integral of the density plus jumps up to t
    // (right-continuous, zero at t = 0).
    double cumulative(double t) const;
    // Integral of the AC density over [s, t].
    double ac_mass(double s, double t) const;
    // Sum of atom sizes with s < atom time <= t.
    double atom_mass(double s, double t) const;

    bool is_atom(double t) const;
    double time_tolerance() const { return tol_; }

private:
    std::vector<PolyPiece> pieces_;
    std::vector<ClockAtom> atoms_;
    double horizon_;
    double tol_;  // absolute tolerance for node/atom coincidence

    void check_time(double t, const char* what) const;
    friend double clock_mass(const BVClock&, double, double);
    friend double control_mass(const BVClock&, double, double);
    friend double lebesgue_density(const BVClock&, double);
};

// Measure of ]s, t] under the clock's Stieltjes measure (AC part + jumps).
double clock_mass(const BVClock& clock, double s, double t);

// Measure of ]s, t] under the control measure: interval length + clock mass.
double control_mass(const BVClock& clock, double s, double t);

// Density of Lebesgue time with respect to the control measure at t:
// zero at atoms, 1 / (1 + ac_density(t)) elsewhere. Always in [0, 1].
double lebesgue_density(const BVClock& clock, double t);

struct CellMeasures {
    double length = 0.0;   // plain interval length
    double clock = 0.0;    // clock mass of the half-open cell
    double control = 0.0;  // length + clock
};

// Nodes 0 = t_0 < ... < t_q = T with per-cell measures; cell k is
// ]nodes[k], nodes[k+1]]. Every atom of the clock is a node, so jumps are
// always realized at cell right endpoints.
struct Partition {
    std::vector<double> nodes;
    std::vector<CellMeasures> cells;
    std::vector<bool> atom_node;  // per node
    double mesh = 0.0;            // requested bound on non-atomic cell mass

    std::size_t cell_count() const { return cells.size(); }
    // Index k with t in ]nodes[k], nodes[k+1]]; t near 0 maps to cell 0.
    std::size_t cell_containing(double t, double tol) const;
    // Index k with t in [nodes[k], nodes[k+1][; t = T maps to the last cell.
    std::size_t cell_left_closed(double t, double tol) const;
};

// Builds a partition whose cells carry control mass at most eps, except that
// a cell ending at an atom may additionally carry that atom's jump. Nodes
// are produced by midpoint bisection between consecutive anchors
// (0, the atoms, T), so partitions for decreasing eps are nested.
Partition build_partition(const BVClock& clock, double eps);

}  // namespace catchup
