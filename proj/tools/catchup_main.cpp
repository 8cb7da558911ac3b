#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "catchup/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"catchup - catching-up solver for measure-driven second-order "
                 "differential inclusions"};
    app.require_subcommand(1);

    catchup::CliOptions options;
    std::string scenario_path;
    std::string solution_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", options.seed, "sampling seed");
        cmd->add_option("--grid", options.grid_count, "uniform output-grid point count");
        cmd->add_option("--tol-vi", options.tol_vi,
                        "variational-inequality tolerance (default: scaled)");
        cmd->add_option("--levels", options.levels, "override the mesh schedule depth");
    };

    CLI::App* solve = app.add_subcommand("solve", "run the scheme and export results");
    solve->add_option("scenario", scenario_path, "scenario file")->required();
    solve->add_option("--out", options.out_dir, "output directory");
    add_common(solve);

    CLI::App* verify = app.add_subcommand("verify", "re-certify exported results");
    verify->add_option("scenario", scenario_path, "scenario file")->required();
    verify->add_option("solution", solution_dir, "directory with trajectory.csv")
        ->required();
    add_common(verify);

    CLI::App* study = app.add_subcommand("study", "convergence study over the schedule");
    study->add_option("scenario", scenario_path, "scenario file")->required();
    study->add_option("--out", options.out_dir, "output directory");
    add_common(study);

    CLI::App* validate = app.add_subcommand("validate", "hypothesis checks only");
    validate->add_option("scenario", scenario_path, "scenario file")->required();
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed())
        return catchup::cmd_solve(scenario_path, options.out_dir, options, std::cout);
    if (verify->parsed())
        return catchup::cmd_verify(scenario_path, solution_dir, options, std::cout);
    if (study->parsed()) return catchup::cmd_study(scenario_path, options, std::cout);
    if (validate->parsed()) return catchup::cmd_validate(scenario_path, options, std::cout);
    return 1;
}
