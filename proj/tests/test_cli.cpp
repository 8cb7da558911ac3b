#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catchup/cli.hpp"

using namespace catchup;
namespace fs = std::filesystem;

namespace {

std::string shipped(const std::string& name) {
    return std::string(CATCHUP_SCENARIO_DIR) + "/" + name;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("catchup_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

TEST_CASE("solve: free motion exits 0 and writes the artifact set") {
    fs::path dir = fresh_dir("solve_free");
    std::ostringstream log;
    CliOptions opt;
    const int code = cmd_solve(shipped("free_motion.json"), dir.string(), opt, log);
    CHECK(code == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "diagnostics.csv"));
    CHECK(fs::exists(dir / "summary.txt"));

    // schema: 2 + 3d + 2 columns for d = 2
    auto lines = split(slurp(dir / "trajectory.csv"), '\n');
    REQUIRE(lines.size() > 2);
    CHECK(lines[0] == "t,nu,u0,u1,v0,v1,dvdnu0,dvdnu1,dlambda_dnu,residual");
    CHECK(split(lines[1], ',').size() == 10);

    // constant velocity columns
    auto first = split(lines[1], ',');
    auto mid = split(lines[lines.size() / 2], ',');
    CHECK(std::stod(first[4]) == doctest::Approx(1.0));
    CHECK(std::stod(mid[4]) == doctest::Approx(1.0));
    CHECK(slurp(dir / "summary.txt").find("converged") != std::string::npos);
}

TEST_CASE("solve: determinism, identical bytes for identical seed") {
    fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
    std::ostringstream log;
    CliOptions opt;
    opt.seed = 7;
    CHECK(cmd_solve(shipped("atom_drop.json"), d1.string(), opt, log) == 0);
    CHECK(cmd_solve(shipped("atom_drop.json"), d2.string(), opt, log) == 0);
    CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
    CHECK(slurp(d1 / "diagnostics.csv") == slurp(d2 / "diagnostics.csv"));
}

TEST_CASE("solve: validation failure exits 1 naming the field") {
    fs::path dir = fresh_dir("badatom");
    fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({
      "dimension": 1,
      "horizon": 1.0,
      "clock": {"atoms": [{"t": 0.5, "size": -2.0}]},
      "operator": {"kind": "linear", "matrix": [[0.0]]},
      "initial": {"u0": [0.0], "v0": [1.0]}
    })";
    std::ostringstream log;
    CliOptions opt;
    CHECK(cmd_solve(bad.string(), (dir / "out").string(), opt, log) == 1);
    CHECK(log.str().find("atoms[0].size") != std::string::npos);
}

TEST_CASE("solve: unmet cauchy tolerance exits 2") {
    fs::path dir = fresh_dir("noconv");
    fs::path scn = dir / "tight.json";
    std::ofstream(scn) << R"({
      "dimension": 2,
      "horizon": 1.0,
      "operator": {"kind": "linear", "matrix": [[0.0, 0.0], [0.0, 0.0]]},
      "perturbation": {"e": [[0.5, -0.5], [0.0, 0.25]]},
      "initial": {"u0": [0.5, 0.0], "v0": [0.0, 0.5]},
      "constants": {"m": 1.1},
      "schedule": {"eps0": 0.1, "ratio": 0.5, "levels": 3},
      "tolerances": {"cauchy": 1e-30}
    })";
    std::ostringstream log;
    CliOptions opt;
    const int code = cmd_solve(scn.string(), (dir / "out").string(), opt, log);
    CHECK(code == 2);
    CHECK(log.str().find("not converged") != std::string::npos);
}

TEST_CASE("solve then verify: fresh artifacts pass, edited velocities fail") {
    fs::path dir = fresh_dir("verify");
    std::ostringstream log;
    CliOptions opt;
    REQUIRE(cmd_solve(shipped("atom_drop.json"), dir.string(), opt, log) == 0);
    CHECK(cmd_verify(shipped("atom_drop.json"), dir.string(), opt, log) == 0);
    CHECK(fs::exists(dir / "vi_report.csv"));

    // hand-edit the trajectory: shift the post-jump velocity column
    auto lines = split(slurp(dir / "trajectory.csv"), '\n');
    std::ostringstream edited;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i == 0 || lines[i].empty()) {
            if (!lines[i].empty()) edited << lines[i] << '\n';
            continue;
        }
        auto cols = split(lines[i], ',');
        if (std::stod(cols[0]) >= 0.5) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", std::stod(cols[3]) - 0.1);
            cols[3] = buf;
        }
        for (std::size_t k = 0; k < cols.size(); ++k)
            edited << cols[k] << (k + 1 < cols.size() ? "," : "");
        edited << '\n';
    }
    std::ofstream(dir / "trajectory.csv", std::ios::binary) << edited.str();

    std::ostringstream log2;
    const int code = cmd_verify(shipped("atom_drop.json"), dir.string(), opt, log2);
    CHECK(code == 3);
    // the report names the worst row's timestamp past the jump
    CHECK(log2.str().find("worst VI inner product") != std::string::npos);
    const auto pos = log2.str().find("at t=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(log2.str().substr(pos + 5)) >= 0.5);
}

TEST_CASE("verify: missing artifacts exit 1") {
    fs::path dir = fresh_dir("noartifacts");
    std::ostringstream log;
    CliOptions opt;
    CHECK(cmd_verify(shipped("atom_drop.json"), dir.string(), opt, log) == 1);
}

TEST_CASE("trajectory shows the jump at the atom row, right-continuous") {
    fs::path dir = fresh_dir("atomrow");
    std::ostringstream log;
    CliOptions opt;
    REQUIRE(cmd_solve(shipped("atom_drop.json"), dir.string(), opt, log) == 0);
    auto lines = split(slurp(dir / "trajectory.csv"), '\n');
    double before = 1e9, at = 1e9;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto cols = split(lines[i], ',');
        const double t = std::stod(cols[0]);
        const double v = std::stod(cols[3]);
        if (t < 0.5) before = v;
        if (t == 0.5 && at == 1e9) at = v;
    }
    CHECK(before > 0.9);                      // left of the jump
    CHECK(at == doctest::Approx(0.0));        // right-continuous value at tau
}

TEST_CASE("study: orders written; free motion flagged exact") {
    fs::path dir = fresh_dir("study");
    std::ostringstream log;
    CliOptions opt;
    opt.out_dir = (dir / "orders_smooth").string();
    CHECK(cmd_study(shipped("ode_smooth.json"), opt, log) == 0);
    auto lines = split(slurp(fs::path(opt.out_dir) / "orders.csv"), '\n');
    CHECK(lines[0] == "level,eps,gap_to_finest,order");
    REQUIRE(lines.size() >= 4);  // header + 3 rows for 4 levels
    const double order = std::stod(split(lines[2], ',')[3]);
    CHECK(order >= 0.8);
    CHECK(order <= 1.3);

    std::ostringstream log2;
    CliOptions opt2;
    opt2.out_dir = (dir / "orders_free").string();
    CHECK(cmd_study(shipped("free_motion.json"), opt2, log2) == 0);
    CHECK(slurp(fs::path(opt2.out_dir) / "orders.csv").find("exact") != std::string::npos);
}

TEST_CASE("study: three-level schedule yields exactly two rows") {
    fs::path dir = fresh_dir("study3");
    fs::path scn = dir / "three.json";
    std::ofstream(scn) << R"({
      "dimension": 2,
      "horizon": 1.0,
      "operator": {"kind": "linear", "matrix": [[0.0, 0.0], [0.0, 0.0]]},
      "initial": {"u0": [0.0, 0.0], "v0": [1.0, -0.5]},
      "schedule": {"eps0": 0.25, "ratio": 0.5, "levels": 3}
    })";
    std::ostringstream log;
    CliOptions opt;
    opt.out_dir = (dir / "out").string();
    CHECK(cmd_study(scn.string(), opt, log) == 0);
    auto lines = split(slurp(fs::path(opt.out_dir) / "orders.csv"), '\n');
    std::size_t rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("study: schedule too short exits 1") {
    fs::path dir = fresh_dir("study2");
    fs::path scn = dir / "two.json";
    std::ofstream(scn) << R"({
      "dimension": 1,
      "horizon": 1.0,
      "operator": {"kind": "linear", "matrix": [[0.0]]},
      "initial": {"u0": [0.0], "v0": [1.0]},
      "schedule": {"levels": 2}
    })";
    std::ostringstream log;
    CliOptions opt;
    opt.out_dir = (dir / "out").string();
    CHECK(cmd_study(scn.string(), opt, log) == 1);
}

TEST_CASE("validate: shipped scenario passes, reports each hypothesis") {
    std::ostringstream log;
    CliOptions opt;
    CHECK(cmd_validate(shipped("state_sweep.json"), opt, log) == 0);
    for (const char* tag : {"(H1)", "(H2)", "(H3)", "(H4)", "(H5)", "(H6)"})
        CHECK(log.str().find(tag) != std::string::npos);

    std::ostringstream log2;
    CHECK(cmd_validate("/nonexistent/file.json", opt, log2) == 1);
}
