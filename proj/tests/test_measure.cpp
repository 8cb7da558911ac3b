#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "catchup/measure.hpp"

using namespace catchup;

namespace {

// independent oracle: midpoint-rule integral of the AC density plus an
// explicit atom sweep, never touching the closed-form path under test
double mass_oracle(const BVClock& clock, double s, double t, int n = 200000) {
    double acc = 0.0;
    const double h = (t - s) / n;
    for (int i = 0; i < n; ++i) acc += clock.ac_density(s + (i + 0.5) * h) * h;
    for (const auto& a : clock.atoms())
        if (a.time > s + 1e-15 && a.time <= t + 1e-15) acc += a.size;
    return acc;
}

BVClock ramp_with_atom() {
    return BVClock({PolyPiece{0.0, {1.0}}}, {{0.5, 2.0}}, 1.0);
}

}  // namespace

TEST_CASE("clock mass: zero density, no atoms") {
    BVClock clock = BVClock::trivial(1.0);
    CHECK(clock_mass(clock, 0.0, 1.0) == 0.0);
    CHECK(control_mass(clock, 0.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("clock mass: half-open interval owns its right endpoint") {
    BVClock clock({}, {{0.5, 2.0}}, 1.0);
    CHECK(clock_mass(clock, 0.4, 0.5) == doctest::Approx(2.0));
    CHECK(clock_mass(clock, 0.5, 0.6) == doctest::Approx(0.0));
    CHECK(control_mass(clock, 0.0, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("clock mass: unit ramp plus atom matches the quadrature oracle") {
    BVClock clock = ramp_with_atom();
    CHECK(clock_mass(clock, 0.0, 1.0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(clock_mass(clock, 0.0, 1.0) ==
          doctest::Approx(mass_oracle(clock, 0.0, 1.0)).epsilon(1e-7));
    CHECK(control_mass(clock, 0.0, 1.0) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("clock mass: piecewise-quadratic density against the oracle") {
    BVClock clock({PolyPiece{0.0, {0.5, 1.0}}, PolyPiece{0.4, {0.9, 0.0, 2.0}}},
                  {{0.25, 0.3}, {0.8, 1.2}}, 1.0);
    for (auto [s, t] : {std::pair{0.0, 1.0}, {0.1, 0.9}, {0.3, 0.5}, {0.25, 0.8}}) {
        CHECK(clock_mass(clock, s, t) ==
              doctest::Approx(mass_oracle(clock, s, t)).epsilon(1e-7));
    }
}

TEST_CASE("clock mass: out-of-range times rejected") {
    BVClock clock = BVClock::trivial(1.0);
    CHECK_THROWS_AS(clock_mass(clock, -0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(clock_mass(clock, 0.0, 1.5), std::domain_error);
    CHECK_THROWS_AS(control_mass(clock, 0.8, 0.2), std::domain_error);
}

TEST_CASE("additivity over adjacent intervals") {
    BVClock clock({PolyPiece{0.0, {0.3, 2.0, -1.0}}}, {{0.2, 0.5}, {0.7, 0.1}}, 1.0);
    std::mt19937_64 rng(7);
    auto u01 = [&] { return double(rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 200; ++trial) {
        double a = u01(), b = u01(), c = u01();
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const double whole = control_mass(clock, a, c);
        const double parts = control_mass(clock, a, b) + control_mass(clock, b, c);
        CHECK(std::fabs(whole - parts) <= 1e-12 * std::max(1.0, whole));
    }
}

TEST_CASE("lebesgue density: atom, flat and ramp cases") {
    BVClock clock = ramp_with_atom();
    CHECK(lebesgue_density(clock, 0.5) == 0.0);  // atom kills the time density
    CHECK(lebesgue_density(clock, 0.25) == doctest::Approx(0.5));  // 1/(1+1)
    BVClock flat = BVClock::trivial(1.0);
    CHECK(lebesgue_density(flat, 0.3) == doctest::Approx(1.0));
}

TEST_CASE("lebesgue density equals the shrinking limit quotient") {
    // nonconstant density so the quotient converges at a visible O(eps) rate
    BVClock clock({PolyPiece{0.0, {0.0, 2.0}}}, {{0.5, 2.0}}, 1.0);
    const double t = 0.25;  // density 2t = 0.5 there, so the limit is 2/3
    const double want = lebesgue_density(clock, t);
    CHECK(want == doctest::Approx(2.0 / 3.0));
    double prev_err = 1e9;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const double quotient = eps / control_mass(clock, t, t + eps);
        const double err = std::fabs(quotient - want);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-4);
}

TEST_CASE("atom exactness: mass concentrates at the jump") {
    BVClock clock({}, {{0.5, 2.0}}, 1.0);
    for (double eps : {0.1, 0.01, 1e-4}) {
        CHECK(clock_mass(clock, 0.5 - eps, 0.5) >= 2.0);
    }
    double tail = clock_mass(clock, 0.5, 0.5 + 1e-6);
    CHECK(tail == doctest::Approx(0.0));
}

TEST_CASE("partition: uniform case") {
    BVClock clock = BVClock::trivial(1.0);
    Partition p = build_partition(clock, 0.25);
    REQUIRE(p.nodes.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(p.nodes[i] == doctest::Approx(0.25 * double(i)));
    for (const auto& c : p.cells) CHECK(c.control == doctest::Approx(0.25));
}

TEST_CASE("partition: atom forced to a node, oversized atom cell flagged") {
    BVClock clock({}, {{0.5, 2.0}}, 1.0);
    Partition p = build_partition(clock, 0.5);
    bool atom_is_node = false;
    for (std::size_t i = 0; i < p.nodes.size(); ++i)
        if (p.nodes[i] == doctest::Approx(0.5) && p.atom_node[i]) atom_is_node = true;
    CHECK(atom_is_node);
    // the cell ending at the atom is ]0.25, 0.5] with control mass 2.25
    const std::size_t k = p.cell_containing(0.5, 1e-12);
    CHECK(p.nodes[k] == doctest::Approx(0.25));
    CHECK(p.cells[k].control == doctest::Approx(2.25));
    // oracle: recompute every cell's mass directly
    for (std::size_t i = 0; i < p.cell_count(); ++i)
        CHECK(p.cells[i].control ==
              doctest::Approx(control_mass(clock, p.nodes[i], p.nodes[i + 1])));
}

TEST_CASE("partition: ramp density halves the admissible cell length") {
    BVClock clock({PolyPiece{0.0, {1.0}}}, {}, 1.0);
    Partition p = build_partition(clock, 0.5);
    for (std::size_t i = 0; i < p.cell_count(); ++i) {
        CHECK(p.cells[i].length <= 0.25 + 1e-12);
        CHECK(p.cells[i].control ==
              doctest::Approx(control_mass(clock, p.nodes[i], p.nodes[i + 1])));
    }
}

TEST_CASE("partition invariants: mesh bound, atom allowance, conservation") {
    BVClock clock({PolyPiece{0.0, {0.5, 1.0}}}, {{0.3, 0.8}, {0.75, 0.2}}, 1.0);
    for (double eps : {0.5, 0.2, 0.05}) {
        Partition p = build_partition(clock, eps);
        double total = 0.0;
        for (std::size_t i = 0; i < p.cell_count(); ++i) {
            const auto& c = p.cells[i];
            CHECK(std::fabs(c.control - (c.length + c.clock)) <= 1e-12 * (1 + c.control));
            if (p.atom_node[i + 1]) {
                double sigma = 0.0;
                for (const auto& a : clock.atoms())
                    if (std::fabs(a.time - p.nodes[i + 1]) < 1e-12) sigma = a.size;
                CHECK(c.control <= eps + sigma + 1e-12);
            } else {
                CHECK(c.control <= eps + 1e-12);
            }
            total += c.control;
        }
        CHECK(std::fabs(total - control_mass(clock, 0.0, 1.0)) <=
              1e-10 * control_mass(clock, 0.0, 1.0));
        for (const auto& a : clock.atoms()) {
            bool found = false;
            for (double n : p.nodes)
                if (std::fabs(n - a.time) < 1e-12) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("partition: halving eps nests the node set") {
    BVClock clock({PolyPiece{0.0, {0.5, 1.0}}}, {{0.3, 0.8}}, 1.0);
    Partition coarse = build_partition(clock, 0.4);
    Partition fine = build_partition(clock, 0.2);
    for (double n : coarse.nodes) {
        bool found = false;
        for (double m : fine.nodes)
            if (std::fabs(n - m) < 1e-12) found = true;
        CHECK(found);
    }
    CHECK_THROWS_AS(build_partition(clock, 0.0), std::domain_error);
}

TEST_CASE("clock construction rejects bad atoms") {
    CHECK_THROWS_AS(BVClock({}, {{0.5, -1.0}}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BVClock({}, {{0.0, 1.0}}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BVClock({}, {{0.6, 1.0}, {0.4, 1.0}}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BVClock({}, {}, -1.0), std::invalid_argument);
}

TEST_CASE("cumulative clock is nondecreasing and right-continuous") {
    BVClock clock({PolyPiece{0.0, {1.0}}}, {{0.5, 2.0}}, 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = double(i) / 1000.0;
        const double r = clock.cumulative(t);
        CHECK(r >= prev - 1e-14);
        prev = r;
    }
    CHECK(clock.cumulative(0.0) == 0.0);
    // right-continuity at the atom: value includes the jump at tau already
    CHECK(clock.cumulative(0.5) == doctest::Approx(2.5));
    CHECK(clock.cumulative(0.5 + 1e-9) == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(clock.cumulative(0.5 - 1e-9) == doctest::Approx(0.5).epsilon(1e-6));
}
