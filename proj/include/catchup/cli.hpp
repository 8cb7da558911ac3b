#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

// Command entry points behind the command-line tool. Each returns the
// process exit code:
//   0  success (solve: converged; verify: all checks pass)
//   1  parse or validation failure
//   2  solve finished the schedule without meeting the Cauchy tolerance
//   3  verify found certificate violations

namespace catchup {

struct CliOptions {
    std::uint64_t seed = 0;
    int grid_count = 512;
    int vi_samples = 12;
    double tol_vi = -1.0;  // <= 0: scaled default
    int levels = 0;        // > 0: overrides the scenario schedule
    std::string out_dir = "out";
};

int cmd_solve(const std::string& scenario_path, const std::string& out_dir,
              const CliOptions& options, std::ostream& log);
int cmd_verify(const std::string& scenario_path, const std::string& solution_dir,
               const CliOptions& options, std::ostream& log);
int cmd_study(const std::string& scenario_path, const CliOptions& options,
              std::ostream& log);
int cmd_validate(const std::string& scenario_path, const CliOptions& options,
                 std::ostream& log);

}  // namespace catchup
