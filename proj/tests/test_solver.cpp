#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "catchup/scenario_io.hpp"
#include "catchup/solver.hpp"

using namespace catchup;

namespace {

Scenario shipped(const std::string& name) {
    return load_scenario(std::string(CATCHUP_SCENARIO_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("validation: shipped scenarios pass every hypothesis check") {
    for (const char* name : {"free_motion.json", "ode_smooth.json", "press.json",
                             "atom_drop.json", "state_sweep.json", "l1_decay.json"}) {
        Scenario scn = shipped(name);
        ValidationReport rep = validate_scenario(scn, 1);
        INFO(name << ": " << rep.failures());
        CHECK(rep.passed());
    }
}

TEST_CASE("validation: undersized declared constants are caught") {
    Scenario scn = shipped("ode_smooth.json");
    scn.m = 0.01;  // (H6) no longer dominated
    ValidationReport rep = validate_scenario(scn, 1);
    CHECK(!rep.passed());
    CHECK(rep.failures().find("(H6)") != std::string::npos);

    Scenario scn2 = shipped("ode_smooth.json");
    scn2.k_bound = 0.01;
    ValidationReport rep2 = validate_scenario(scn2, 1);
    CHECK(rep2.failures().find("(H5)") != std::string::npos);

    Scenario scn3 = shipped("state_sweep.json");
    scn3.gamma = 0.0;  // state motion present but undeclared
    scn3.op = OperatorFamily::moving_normal_cone(
        MovingSetSpec(scn3.op.moving_spec()), scn3.clock, 0.0, 0.0);
    ValidationReport rep3 = validate_scenario(scn3, 1);
    CHECK(rep3.failures().find("(H1)") != std::string::npos);
}

TEST_CASE("validation: inadmissible initial velocity is caught") {
    Scenario scn = shipped("press.json");
    scn.v0 = {5.0};
    ValidationReport rep = validate_scenario(scn, 1);
    CHECK(!rep.passed());
    CHECK(rep.failures().find("v0") != std::string::npos);
    CHECK_THROWS_AS(solve(scn), validation_error);
}

TEST_CASE("solve: free motion is exact and converges with zero gaps") {
    Scenario scn = shipped("free_motion.json");
    Solution sol = solve(scn);
    CHECK(sol.converged);
    CHECK(sol.final_gap <= 1e-13);
    for (const auto& s : sol.samples) {
        CHECK(s.v[0] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(s.v[1] == doctest::Approx(-0.5).epsilon(1e-13));
        CHECK(s.u[0] == doctest::Approx(s.t).epsilon(1e-12));
    }
    CHECK(sol.certificate.min_vi >= -1e-12);
}

TEST_CASE("solve: constant load reduces to the closed-form parabola") {
    Scenario scn = shipped("free_motion.json");
    // f = (2, 0): u'' = -2 in the first component under plain time
    scn.f = Perturbation(2, {{2.0}, {0.0}}, {}, {}, {}, {}, {});
    scn.m = 2.0;
    scn.tol.cauchy = 0.05;
    Solution sol = solve(scn);
    CHECK(sol.converged);
    const double eps_finest = sol.levels.back().eps;
    for (const auto& s : sol.samples) {
        const double u_exact = s.t - s.t * s.t;  // u0=0, v0=1, g=2
        const double v_exact = 1.0 - 2.0 * s.t;
        CHECK(std::fabs(s.v[0] - v_exact) <= 2.0 * eps_finest);
        CHECK(std::fabs(s.u[0] - u_exact) <= 4.0 * eps_finest);
    }
}

TEST_CASE("solve: atom scenario jumps exactly at the atom") {
    Scenario scn = shipped("atom_drop.json");
    Solution sol = solve(scn);
    CHECK(sol.converged);
    Interpolant interp = sol.interpolant();
    CHECK(interp.v_at(0.5)[0] == doctest::Approx(0.0));
    CHECK(interp.v_at(0.49999)[0] > 0.9);
    CHECK(interp.v_at(0.75)[0] == doctest::Approx(0.0));
    // left and right limits match the projection relation at the jump
    const double left = interp.v_at(0.5 - 1e-9)[0];
    const double projected = std::min(left, 0.0);  // projection onto (-inf, 0]
    CHECK(std::fabs(interp.v_at(0.5)[0] - projected) <= sol.levels.back().eps + 1e-10);
}

TEST_CASE("solve: nested refinements and monotone gaps") {
    Scenario scn = shipped("atom_drop.json");
    Partition coarse = build_partition(scn.clock, scn.schedule.eps0);
    Partition fine = build_partition(scn.clock, scn.schedule.eps0 * scn.schedule.ratio);
    for (double n : coarse.nodes) {
        bool found = false;
        for (double m : fine.nodes)
            if (std::fabs(n - m) <= 1e-12) found = true;
        CHECK(found);
    }
    Solution sol = solve(scn);
    std::vector<double> gaps;
    for (const auto& l : sol.levels)
        if (l.sup_gap >= 0) gaps.push_back(l.sup_gap);
    REQUIRE(gaps.size() >= 3);
    const std::size_t n = gaps.size();
    CHECK(gaps[n - 1] <= 1.05 * gaps[n - 2]);
    CHECK(gaps[n - 2] <= 1.05 * gaps[n - 3]);
}

TEST_CASE("solution invariants: discrete u-density identity and increment bound") {
    Scenario scn = shipped("state_sweep.json");
    Solution sol = solve(scn);
    CHECK(sol.converged);
    const DiscreteTrajectory& traj = sol.finest;
    for (std::size_t k = 0; k < traj.partition.cell_count(); ++k) {
        Vec lhs = (1.0 / traj.partition.cells[k].control) * (traj.u[k + 1] - traj.u[k]);
        CHECK(dist(lhs, traj.v[k + 1]) <= 1e-11 * (1.0 + norm(traj.v[k + 1])));
    }
    // sampled u-density equals the enclosing cell's right-node velocity
    Interpolant du_check = sol.interpolant();
    for (const auto& s : sol.samples) {
        const std::size_t k =
            traj.partition.cell_containing(s.t, scn.clock.time_tolerance());
        CHECK(dist(s.dudnu, traj.v[k + 1]) <= 1e-11 * (1.0 + norm(traj.v[k + 1])));
        CHECK(dist(du_check.du_density(s.t), s.dudnu) == 0.0);
    }
    // velocity increment bound against the control measure on sampled pairs
    Interpolant interp = sol.interpolant();
    for (auto [s, t] : {std::pair{0.1, 0.3}, {0.25, 0.8}, {0.55, 0.65}, {0.0, 1.0}}) {
        Vec vs = interp.v_at(s), vt = interp.v_at(t);
        CHECK(dist(vt, vs) <= sol.bounds.M5 * control_mass(scn.clock, s, t) + 1e-12);
    }
    // domain condition along the output grid
    CHECK(sol.certificate.domain_passed());
}

TEST_CASE("verify: free motion gives identically zero inner products") {
    Scenario scn = shipped("free_motion.json");
    Solution sol = solve(scn);
    VerifyReport rep = verify(sol, 8, 3);
    CHECK(rep.min_vi >= -1e-12);
    CHECK(rep.max_domain <= 1e-12);
    CHECK(rep.u_density_passed());
}

TEST_CASE("verify: pressed boundary holds the inequality strictly inside") {
    Scenario scn = shipped("press.json");
    Solution sol = solve(scn);
    CHECK(sol.converged);
    CHECK(sol.certificate.vi_passed());
    // 1D sign oracle at a pressed-phase time: the inner product is
    // (density - 0.25)(z - v), strictly positive for interior z
    Interpolant interp = sol.interpolant();
    const double t = 0.75;
    const double v = interp.v_at(t)[0];
    CHECK(v == doctest::Approx(0.6).epsilon(1e-6));
    Vec density = interp.dv_density(t);
    for (double z : {-0.5, 0.0, 0.3}) {
        const double vi = (density[0] + (-0.25)) * (z - v);
        CHECK(vi > 0.05);
    }
}

TEST_CASE("verify: perturbed velocities are flagged (negative control)") {
    Scenario scn = shipped("atom_drop.json");
    Solution sol = solve(scn);
    REQUIRE(sol.certificate.passed());
    std::vector<SolutionSample> corrupted = sol.samples;
    for (auto& s : corrupted)
        if (s.t >= 0.5) s.v[0] -= 0.1;
    VerifyReport rep = verify(scn, corrupted, sol.finest.partition, 12, 5);
    CHECK(!rep.passed());
    CHECK(rep.min_vi < -rep.tol_vi);
    CHECK(rep.worst_vi_time >= 0.5);
}

TEST_CASE("convergence study: smooth scenario shows first order") {
    Scenario scn = shipped("ode_smooth.json");
    auto rows = convergence_study(scn);
    REQUIRE(rows.size() == 3);  // 4 levels -> 3 gap rows
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(!rows[i].exact);
        CHECK(rows[i].order >= 0.8);
        CHECK(rows[i].order <= 1.3);
    }
}

TEST_CASE("convergence study: free motion reports exact gaps") {
    Scenario scn = shipped("free_motion.json");
    scn.schedule.levels = 3;
    auto rows = convergence_study(scn);
    REQUIRE(rows.size() == 2);  // three-level minimum: exactly two rows
    for (const auto& r : rows) CHECK(r.exact);
}

TEST_CASE("convergence study: refuses schedules below three levels") {
    Scenario scn = shipped("free_motion.json");
    scn.schedule.levels = 2;
    CHECK_THROWS_AS(convergence_study(scn), std::domain_error);
}

TEST_CASE("solve: a priori constants dominate iterates and densities") {
    for (const char* name : {"free_motion.json", "press.json", "atom_drop.json"}) {
        Scenario scn = shipped(name);
        Solution sol = solve(scn);
        for (const auto& u : sol.finest.u) CHECK(norm(u) <= sol.bounds.M);
        for (const auto& v : sol.finest.v) CHECK(norm(v) <= sol.bounds.M);
        for (const auto& s : sol.samples) CHECK(norm(s.dvdnu) <= sol.bounds.M5);
    }
}

TEST_CASE("solve: l1 decay reaches rest and certifies") {
    Scenario scn = shipped("l1_decay.json");
    Solution sol = solve(scn);
    CHECK(sol.converged);
    Interpolant interp = sol.interpolant();
    CHECK(interp.v_at(0.4)[0] == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(interp.v_at(0.95)[0] == doctest::Approx(0.0));
    CHECK(sol.certificate.passed());
}
