#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "catchup/linalg.hpp"
#include "catchup/measure.hpp"
#include "catchup/operators.hpp"
#include "catchup/perturbation.hpp"

// The catching-up discretization: per-cell perturbation loads, resolvent
// steps, right-continuous interpolants, trajectory densities, and the
// discrete Gronwall machinery behind the a priori iterate bounds.

namespace catchup {

// Closed-form constant chain bounding iterates and densities for any run of
// the scheme on a scenario with growth constant m, minimal-section growth c,
// state Lipschitz constant gamma, initial data norms and horizon T.
struct AprioriBounds {
    double m1 = 0.0, c1 = 0.0, gamma1 = 0.0;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    double M = 0.0;
    double M1 = 0.0, M2 = 0.0, M3 = 0.0, M4 = 0.0, M5 = 0.0;
};

AprioriBounds apriori_bounds(double m, double c, double gamma, double u0_norm,
                             double v0_norm, double horizon);

struct DiscreteTrajectory {
    Partition partition;
    std::vector<Vec> u;             // q+1 iterates
    std::vector<Vec> v;             // q+1 iterates
    std::vector<Vec> loads;         // q per-cell integrals of f against time
    std::vector<double> residuals;  // q per-cell inclusion certificates

    double max_residual() const;
};

// Integral of s -> f(s, u_frozen, v_frozen) over [a, b] against Lebesgue
// time, by adaptive Simpson refinement to absolute tolerance
// 1e-12 (1 + |f(a, u, v)|) (b - a).
Vec cell_load(const Perturbation& f, double a, double b, const Vec& u_frozen,
              const Vec& v_frozen);

struct StepResult {
    Vec u_next;
    Vec v_next;
    double residual = 0.0;
};

// One catching-up step over a cell ending at t_next with control mass beta:
// v+ solves the resolvent inclusion at (t_next, u), u+ advances along v+,
// and the residual certifies -(v+ - v + F)/beta against the graph.
StepResult catch_up_step(const OperatorFamily& fam, double t_next, double beta,
                         const Vec& u, const Vec& v, const Vec& load);

struct RunOptions {
    double domain_tol = 1e-8;  // admissibility of v0
    // When set, iterate and increment bounds are enforced each step and a
    // violation aborts the run: it means the declared scenario constants do
    // not dominate the dynamics.
    std::optional<AprioriBounds> enforce_bounds;
};

// Full induction over the partition cells. Throws std::domain_error when v0
// lies outside the initial domain, std::runtime_error on bound violations.
DiscreteTrajectory run(const OperatorFamily& fam, const Perturbation& f,
                       const BVClock& clock, const Partition& partition, Vec u0,
                       Vec v0, const RunOptions& options = {});

// Right-continuous interpolants of a discrete trajectory and the density of
// its velocity measure against the control measure. Non-owning view.
class Interpolant {
public:
    Interpolant(const DiscreteTrajectory& traj, const BVClock& clock,
                const Perturbation& f)
        : traj_(&traj), clock_(&clock), f_(&f) {}

    // (u(t), v(t)) for t in [0, T]; right-continuous, matches iterates at nodes.
    std::pair<Vec, Vec> at(double t) const;
    Vec u_at(double t) const { return at(t).first; }
    Vec v_at(double t) const { return at(t).second; }

    // dv/d(control) over the cell containing t, minus the Lebesgue-weighted
    // perturbation term; bounded by M5 of the a priori chain.
    Vec dv_density(double t) const;

    // du/d(control) over the cell containing t; equals the cell's
    // right-node velocity, the discrete form of du/dnu = v.
    Vec du_density(double t) const;

    const DiscreteTrajectory& trajectory() const { return *traj_; }

private:
    const DiscreteTrajectory* traj_;
    const BVClock* clock_;
    const Perturbation* f_;
};

// Closed-form majorant of discrete Gronwall recursions
//   a_{i+1} <= alpha_i + beta_i (a_0 + ... + a_{i-1}) + (1 + gamma_i) a_i:
// returns bounds[j] >= a_j for j = 0..n. All inputs must be nonnegative.
std::vector<double> gronwall_bound(const std::vector<double>& alpha,
                                   const std::vector<double>& beta,
                                   const std::vector<double>& gamma, double a0);

}  // namespace catchup
