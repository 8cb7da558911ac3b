#include "catchup/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace catchup {

double PolyPiece::eval(double t) const {
    const double x = t - start;
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
    return v;
}

double PolyPiece::integral_from_start(double t) const {
    const double x = t - start;
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k] / double(k + 1);
    return v * x;
}

BVClock::BVClock(std::vector<PolyPiece> ac_pieces, std::vector<ClockAtom> atoms,
                 double horizon)
    : pieces_(std::move(ac_pieces)), atoms_(std::move(atoms)), horizon_(horizon) {
    if (!(horizon_ > 0.0)) throw std::invalid_argument("BVClock: horizon must be positive");
    tol_ = 1e-12 * horizon_;
    if (pieces_.empty()) pieces_.push_back(PolyPiece{0.0, {0.0}});
    if (std::fabs(pieces_.front().start) > tol_)
        throw std::invalid_argument("BVClock: first density piece must start at 0");
    pieces_.front().start = 0.0;
    for (std::size_t i = 1; i < pieces_.size(); ++i)
        if (pieces_[i].start <= pieces_[i - 1].start)
            throw std::invalid_argument("BVClock: density piece starts must increase");
    if (pieces_.back().start >= horizon_)
        throw std::invalid_argument("BVClock: density piece starts past the horizon");
    double prev = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
        const auto& a = atoms_[j];
        const std::string where = "atoms[" + std::to_string(j) + "]";
        if (!(a.size > 0.0)) throw std::invalid_argument("BVClock: " + where + ".size must be positive");
        if (!(a.time > 0.0) || a.time > horizon_ + tol_)
            throw std::invalid_argument("BVClock: " + where + ".t must lie in (0, horizon]");
        if (a.time <= prev + tol_)
            throw std::invalid_argument("BVClock: " + where + ".t must strictly increase");
        prev = a.time;
    }
}

void BVClock::check_time(double t, const char* what) const {
    if (t < -tol_ || t > horizon_ + tol_)
        throw std::domain_error(std::string(what) + ": time outside [0, horizon]");
}

double BVClock::ac_density(double t) const {
    check_time(t, "ac_density");
    // pieces are right-continuous: piece i covers [start_i, start_{i+1})
    std::size_t i = pieces_.size() - 1;
    while (i > 0 && t < pieces_[i].start) --i;
    return pieces_[i].eval(t);
}

double BVClock::ac_mass(double s, double t) const {
    check_time(s, "ac_mass");
    check_time(t, "ac_mass");
    if (t <= s) {
        if (t < s - tol_) throw std::domain_error("ac_mass: interval reversed");
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const double lo = std::max(s, pieces_[i].start);
        const double hi =
            std::min(t, i + 1 < pieces_.size() ? pieces_[i + 1].start : horizon_);
        if (hi > lo)
            total += pieces_[i].integral_from_start(hi) - pieces_[i].integral_from_start(lo);
    }
    return total;
}

double BVClock::atom_mass(double s, double t) const {
    double total = 0.0;
    for (const auto& a : atoms_)
        if (a.time > s + tol_ && a.time <= t + tol_) total += a.size;
    return total;
}

double BVClock::cumulative(double t) const {
    check_time(t, "cumulative");
    return ac_mass(0.0, std::max(0.0, t)) + atom_mass(0.0, t);
}

bool BVClock::is_atom(double t) const {
    for (const auto& a : atoms_)
        if (std::fabs(a.time - t) <= tol_) return true;
    return false;
}

double clock_mass(const BVClock& clock, double s, double t) {
    clock.check_time(s, "clock_mass");
    clock.check_time(t, "clock_mass");
    if (t < s - clock.tol_) throw std::domain_error("clock_mass: interval reversed");
    if (t <= s) return 0.0;
    return clock.ac_mass(s, t) + clock.atom_mass(s, t);
}

double control_mass(const BVClock& clock, double s, double t) {
    clock.check_time(s, "control_mass");
    clock.check_time(t, "control_mass");
    if (t < s - clock.tol_) throw std::domain_error("control_mass: interval reversed");
    if (t <= s) return 0.0;
    return (t - s) + clock_mass(clock, s, t);
}

double lebesgue_density(const BVClock& clock, double t) {
    clock.check_time(t, "lebesgue_density");
    if (clock.is_atom(t)) return 0.0;
    return 1.0 / (1.0 + clock.ac_density(t));
}

std::size_t Partition::cell_containing(double t, double tol) const {
    if (t <= nodes.front() + tol) return 0;
    // first node >= t - tol; cell is the one ending there
    auto it = std::lower_bound(nodes.begin(), nodes.end(), t - tol);
    std::size_t idx = std::size_t(it - nodes.begin());
    if (idx == 0) return 0;
    if (idx > cells.size()) throw std::domain_error("cell_containing: time past horizon");
    return idx - 1;
}

std::size_t Partition::cell_left_closed(double t, double tol) const {
    if (t >= nodes.back() - tol) return cells.size() - 1;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t + tol);
    std::size_t idx = std::size_t(it - nodes.begin());
    if (idx == 0) throw std::domain_error("cell_left_closed: time before 0");
    return idx - 1;
}

namespace {

// Non-atomic control mass of ]a, b]: length plus AC clock mass. Atoms are
// segment right endpoints and are excluded from the refinement criterion.
double splittable_mass(const BVClock& clock, double a, double b) {
    return (b - a) + clock.ac_mass(a, b);
}

void bisect(const BVClock& clock, double a, double b, double eps,
            std::vector<double>& out, int depth) {
    if (depth > 60)
        throw std::runtime_error("build_partition: bisection depth exceeded");
    const double total = control_mass(clock, a, b);
    const double na = splittable_mass(clock, a, b);
    if (total > eps && na > 0.5 * eps) {
        const double m = 0.5 * (a + b);
        bisect(clock, a, m, eps, out, depth + 1);
        bisect(clock, m, b, eps, out, depth + 1);
    } else {
        out.push_back(b);
    }
}

}  // namespace

Partition build_partition(const BVClock& clock, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("build_partition: eps must be positive");
    const double T = clock.horizon();
    const double tol = clock.time_tolerance();

    std::vector<double> anchors{0.0};
    for (const auto& a : clock.atoms()) anchors.push_back(std::min(a.time, T));
    if (anchors.back() < T - tol) anchors.push_back(T);

    Partition p;
    p.mesh = eps;
    p.nodes.push_back(0.0);
    for (std::size_t k = 0; k + 1 < anchors.size(); ++k)
        bisect(clock, anchors[k], anchors[k + 1], eps, p.nodes, 0);

    p.cells.resize(p.nodes.size() - 1);
    p.atom_node.resize(p.nodes.size());
    for (std::size_t i = 0; i < p.nodes.size(); ++i)
        p.atom_node[i] = clock.is_atom(p.nodes[i]);
    for (std::size_t k = 0; k + 1 < p.nodes.size(); ++k) {
        CellMeasures& c = p.cells[k];
        c.length = p.nodes[k + 1] - p.nodes[k];
        c.clock = clock_mass(clock, p.nodes[k], p.nodes[k + 1]);
        c.control = c.length + c.clock;
    }
    return p;
}

}  // namespace catchup
