#include "catchup/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "catchup/scenario_io.hpp"
#include "catchup/solver.hpp"

namespace catchup {

namespace {

namespace fs = std::filesystem;

// 17 significant digits: doubles survive the write/read round trip exactly.
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string trajectory_csv(const Solution& sol) {
    const std::size_t d = sol.scenario.dimension;
    std::ostringstream os;
    os << "t,nu";
    for (std::size_t i = 0; i < d; ++i) os << ",u" << i;
    for (std::size_t i = 0; i < d; ++i) os << ",v" << i;
    for (std::size_t i = 0; i < d; ++i) os << ",dvdnu" << i;
    os << ",dlambda_dnu,residual\n";
    for (const auto& s : sol.samples) {
        os << num(s.t) << ',' << num(s.control_from_0);
        for (double x : s.u) os << ',' << num(x);
        for (double x : s.v) os << ',' << num(x);
        for (double x : s.dvdnu) os << ',' << num(x);
        os << ',' << num(s.lebesgue) << ',' << num(s.residual) << '\n';
    }
    return os.str();
}

std::string diagnostics_csv(const Solution& sol) {
    std::ostringstream os;
    os << "name,value\n";
    for (std::size_t i = 0; i < sol.levels.size(); ++i) {
        os << "level" << i << ".eps," << num(sol.levels[i].eps) << '\n';
        os << "level" << i << ".cells," << sol.levels[i].cells << '\n';
        if (sol.levels[i].sup_gap >= 0)
            os << "level" << i << ".sup_gap," << num(sol.levels[i].sup_gap) << '\n';
    }
    const AprioriBounds& b = sol.bounds;
    os << "const.m1," << num(b.m1) << '\n';
    os << "const.c1," << num(b.c1) << '\n';
    os << "const.gamma1," << num(b.gamma1) << '\n';
    os << "const.m2," << num(b.m2) << '\n';
    os << "const.m3," << num(b.m3) << '\n';
    os << "const.m4," << num(b.m4) << '\n';
    os << "const.M," << num(b.M) << '\n';
    os << "const.M1," << num(b.M1) << '\n';
    os << "const.M2," << num(b.M2) << '\n';
    os << "const.M3," << num(b.M3) << '\n';
    os << "const.M4," << num(b.M4) << '\n';
    os << "const.M5," << num(b.M5) << '\n';
    os << "residual.max," << num(sol.finest.max_residual()) << '\n';
    os << "vi.worst," << num(sol.certificate.min_vi) << '\n';
    os << "vi.worst_time," << num(sol.certificate.worst_vi_time) << '\n';
    os << "vi.tol," << num(sol.certificate.tol_vi) << '\n';
    os << "domain.max," << num(sol.certificate.max_domain) << '\n';
    os << "u_density.max_gap," << num(sol.certificate.max_u_density_gap) << '\n';
    os << "cauchy.final_gap," << num(sol.final_gap) << '\n';
    os << "cauchy.tol," << num(sol.scenario.tol.cauchy) << '\n';
    os << "converged," << (sol.converged ? 1 : 0) << '\n';
    return os.str();
}

std::string summary_text(const Solution& sol) {
    std::ostringstream os;
    os << "status: " << (sol.converged ? "converged" : "not converged at schedule end")
       << "\n";
    os << "levels: " << sol.levels.size() << ", finest cells: "
       << sol.finest.partition.cell_count() << "\n";
    os << "final sup gap: " << num(sol.final_gap) << " (tolerance "
       << num(sol.scenario.tol.cauchy) << ")\n";
    os << "max inclusion residual: " << num(sol.finest.max_residual()) << "\n";
    os << "worst VI inner product: " << num(sol.certificate.min_vi) << " at t="
       << num(sol.certificate.worst_vi_time) << " (tolerance -"
       << num(sol.certificate.tol_vi) << ")\n";
    os << "max domain distance: " << num(sol.certificate.max_domain) << "\n";
    os << "iterate bound M: " << num(sol.bounds.M) << ", density bound M5: "
       << num(sol.bounds.M5) << "\n";
    return os.str();
}

std::string vi_report_csv(const VerifyReport& rep) {
    std::ostringstream os;
    os << "t,worst_vi,domain_distance,u_density_gap\n";
    for (const auto& r : rep.rows) {
        os << num(r.t) << ',' << num(r.worst_vi) << ',' << num(r.domain_distance) << ',';
        if (r.u_density_gap >= 0) os << num(r.u_density_gap);
        os << '\n';
    }
    return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
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

// Reads trajectory.csv back into solution samples (the surface cmd_verify
// certifies, so hand-edited files are re-checked as-is).
std::vector<SolutionSample> read_trajectory_csv(const fs::path& path, std::size_t d) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing solution artifact: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty trajectory file: " + path.string());
    const std::size_t expected = 2 + 3 * d + 2;
    if (split(line, ',').size() != expected)
        throw std::runtime_error("trajectory header has wrong column count");
    std::vector<SolutionSample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto parts = split(line, ',');
        if (parts.size() != expected)
            throw std::runtime_error("trajectory row has wrong column count");
        SolutionSample s;
        std::size_t k = 0;
        s.t = std::stod(parts[k++]);
        s.control_from_0 = std::stod(parts[k++]);
        s.u.resize(d);
        s.v.resize(d);
        s.dvdnu.resize(d);
        for (std::size_t i = 0; i < d; ++i) s.u[i] = std::stod(parts[k++]);
        for (std::size_t i = 0; i < d; ++i) s.v[i] = std::stod(parts[k++]);
        for (std::size_t i = 0; i < d; ++i) s.dvdnu[i] = std::stod(parts[k++]);
        s.lebesgue = std::stod(parts[k++]);
        s.residual = std::stod(parts[k++]);
        samples.push_back(std::move(s));
    }
    return samples;
}

double finest_eps(const Scenario& scn, const CliOptions& options) {
    const int levels = options.levels > 0 ? options.levels : scn.schedule.levels;
    double eps = scn.schedule.eps0;
    for (int i = 1; i < levels; ++i) eps *= scn.schedule.ratio;
    return eps;
}

}  // namespace

int cmd_solve(const std::string& scenario_path, const std::string& out_dir,
              const CliOptions& options, std::ostream& log) {
    Scenario scn;
    try {
        scn = load_scenario(scenario_path);
    } catch (const scenario_parse_error& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    SolveOptions sopt;
    sopt.seed = options.seed;
    sopt.grid_count = options.grid_count;
    sopt.vi_samples = options.vi_samples;
    sopt.tol_vi_override = options.tol_vi;
    sopt.levels_override = options.levels;
    Solution sol;
    try {
        sol = solve(scn, sopt);
    } catch (const validation_error& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "trajectory.csv", trajectory_csv(sol));
    write_file(fs::path(out_dir) / "diagnostics.csv", diagnostics_csv(sol));
    write_file(fs::path(out_dir) / "summary.txt", summary_text(sol));
    log << summary_text(sol);
    return sol.converged ? 0 : 2;
}

int cmd_verify(const std::string& scenario_path, const std::string& solution_dir,
               const CliOptions& options, std::ostream& log) {
    Scenario scn;
    std::vector<SolutionSample> samples;
    try {
        scn = load_scenario(scenario_path);
        samples = read_trajectory_csv(fs::path(solution_dir) / "trajectory.csv",
                                      scn.dimension);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    Partition finest = build_partition(scn.clock, finest_eps(scn, options));
    VerifyReport rep = verify(scn, samples, finest, options.vi_samples, options.seed,
                              options.tol_vi);
    write_file(fs::path(solution_dir) / "vi_report.csv", vi_report_csv(rep));
    log << "worst VI inner product: " << num(rep.min_vi) << " at t="
        << num(rep.worst_vi_time) << " (tolerance -" << num(rep.tol_vi) << ")\n";
    log << "max domain distance: " << num(rep.max_domain) << " (tolerance "
        << num(rep.tol_domain) << ")\n";
    log << "max u-density gap: " << num(rep.max_u_density_gap) << " (tolerance "
        << num(rep.tol_u_density) << ")\n";
    if (rep.passed()) {
        log << "certificate: PASS\n";
        return 0;
    }
    log << "certificate: FAIL\n";
    return 3;
}

int cmd_study(const std::string& scenario_path, const CliOptions& options,
              std::ostream& log) {
    Scenario scn;
    try {
        scn = load_scenario(scenario_path);
    } catch (const scenario_parse_error& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    std::vector<StudyRow> rows;
    try {
        rows = convergence_study(scn);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    std::ostringstream os;
    os << "level,eps,gap_to_finest,order\n";
    for (const auto& r : rows) {
        os << r.level << ',' << num(r.eps) << ',' << num(r.gap_to_reference) << ',';
        if (r.exact)
            os << "exact";
        else if (!std::isnan(r.order))
            os << num(r.order);
        os << '\n';
    }
    fs::create_directories(options.out_dir);
    write_file(fs::path(options.out_dir) / "orders.csv", os.str());
    log << os.str();
    return 0;
}

int cmd_validate(const std::string& scenario_path, const CliOptions& options,
                 std::ostream& log) {
    Scenario scn;
    try {
        scn = load_scenario(scenario_path);
    } catch (const scenario_parse_error& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    ValidationReport rep = validate_scenario(scn, options.seed);
    for (const auto& c : rep.checks) {
        log << (c.passed ? "PASS " : "FAIL ") << c.tag;
        if (c.sampled) log << " [sampled]";
        if (!c.detail.empty()) log << " - " << c.detail;
        log << "\n";
    }
    if (!rep.passed()) {
        log << "validation: FAIL\n";
        return 1;
    }
    log << "validation: PASS (sampled checks are necessary, not sufficient)\n";
    return 0;
}

}  // namespace catchup
