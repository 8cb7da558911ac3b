#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "catchup/measure.hpp"
#include "catchup/operators.hpp"
#include "catchup/perturbation.hpp"
#include "catchup/scheme.hpp"

// Refinement loop over a geometric mesh schedule, Cauchy-convergence
// diagnostics on nested partitions, and certification of the computed
// trajectory against the inclusion's variational-inequality and domain
// conditions.

namespace catchup {

struct Schedule {
    double eps0 = 0.25;
    double ratio = 0.5;
    int levels = 6;
};

struct Tolerances {
    double inclusion = 1e-8;  // per-cell graph residual
    double domain = 1e-8;     // admissibility of v0 and discrete iterates
    double cauchy = 1e-3;     // sup-gap threshold declaring convergence
    double vi_base = 1e-6;    // scaled by (1 + M5 + c (1 + 2M)) at check time
};

struct Scenario {
    std::size_t dimension = 0;
    double horizon = 1.0;
    BVClock clock = BVClock::trivial(1.0);
    OperatorFamily op =
        OperatorFamily::linear(Mat::identity(1), BVClock::trivial(1.0), 1.0);
    Perturbation f;
    Vec u0, v0;
    // declared hypothesis constants
    double gamma = 0.0;    // state Lipschitz constant of the operator family
    double c = 0.0;        // minimal-section growth constant
    double m = 0.0;        // perturbation growth constant
    double k_bound = 0.0;  // perturbation Lipschitz bound
    Schedule schedule;
    Tolerances tol;

    AprioriBounds bounds() const {
        return apriori_bounds(m, c, gamma, norm(u0), norm(v0), horizon);
    }
    double scaled_vi_tol() const {
        const AprioriBounds b = bounds();
        return tol.vi_base * (1.0 + b.M5 + c * (1.0 + 2.0 * b.M));
    }
};

struct HypothesisCheck {
    std::string tag;      // "(H1)" ... "(H6)", "initial", "clock"
    bool passed = false;
    bool sampled = false;  // sampling validators are necessary, not sufficient
    std::string detail;
};

struct ValidationReport {
    std::vector<HypothesisCheck> checks;
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    std::string failures() const;
};

// Sampling validators for the scenario hypotheses plus structural checks.
ValidationReport validate_scenario(const Scenario& scn, std::uint64_t seed);

struct SolutionSample {
    double t = 0.0;
    double control_from_0 = 0.0;  // control mass of ]0, t]
    Vec u, v, dvdnu;
    Vec dudnu;              // u-density of the enclosing cell (= right-node v)
    double lebesgue = 0.0;  // density of Lebesgue time w.r.t. control at t
    double residual = 0.0;  // inclusion certificate of the enclosing cell
};

struct LevelInfo {
    double eps = 0.0;
    std::size_t cells = 0;
    double sup_gap = -1.0;  // vs previous level; -1 for the first level
};

struct VerifyRow {
    double t = 0.0;
    double worst_vi = 0.0;       // min over sampled z of the VI inner product
    double domain_distance = 0.0;
    double u_density_gap = -1.0; // node rows only; -1 elsewhere
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    double min_vi = 0.0;
    double max_domain = 0.0;
    double max_u_density_gap = 0.0;
    double tol_vi = 0.0;
    double tol_domain = 0.0;
    double tol_u_density = 0.0;
    double worst_vi_time = 0.0;
    bool vi_passed() const { return min_vi >= -tol_vi; }
    bool domain_passed() const { return max_domain <= tol_domain; }
    bool u_density_passed() const { return max_u_density_gap <= tol_u_density; }
    bool passed() const { return vi_passed() && domain_passed() && u_density_passed(); }
};

struct Solution {
    Scenario scenario;
    DiscreteTrajectory finest;
    std::vector<LevelInfo> levels;
    std::vector<SolutionSample> samples;
    AprioriBounds bounds;
    bool converged = false;
    double final_gap = 0.0;
    VerifyReport certificate;

    Interpolant interpolant() const {
        return Interpolant(finest, scenario.clock, scenario.f);
    }
};

struct SolveOptions {
    std::uint64_t seed = 0;
    int grid_count = 512;      // uniform time grid merged into the output grid
    int vi_samples = 12;       // z probes per grid point (plus vertices)
    double tol_vi_override = -1.0;  // <= 0 means use the scaled default
    int levels_override = 0;        // > 0 overrides the schedule
};

// Thrown when the scenario fails its hypothesis validation.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

Solution solve(const Scenario& scn, const SolveOptions& options = {});

// Certification of a sampled trajectory: for each sample time, probes z in
// the operator domain (random projections plus active vertices) and checks
// <A0(t,u)z + dv/dnu + f(t,u,v) dlambda/dnu, z - v> >= -tol, the domain
// condition, and the discrete u-density identity at partition nodes.
VerifyReport verify(const Scenario& scn, std::span<const SolutionSample> samples,
                    const Partition& finest, int z_samples, std::uint64_t seed,
                    double tol_vi_override = -1.0);

VerifyReport verify(const Solution& sol, int z_samples, std::uint64_t seed,
                    double tol_vi_override = -1.0);

struct StudyRow {
    int level = 0;
    double eps = 0.0;
    double gap_to_reference = 0.0;
    double order = 0.0;      // log2 of successive gap ratio; NaN when undefined
    bool exact = false;      // gaps at machine precision
};

// Empirical counterpart of the mesh limit: gaps of each level against the
// finest level and the observed refinement orders. Needs >= 3 levels.
std::vector<StudyRow> convergence_study(const Scenario& scn);

}  // namespace catchup
