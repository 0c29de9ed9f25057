#include "vem2d/errors.hpp"
#include "vem2d/studies.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config_path, "study configuration file (key = value lines)");
    cmd->add_option("--out", args.out_dir, "output directory for CSV tables and fields");
    cmd->add_option("--threads", args.threads, "assembly threads");
    cmd->add_option("--seed", args.seed, "seed for the Voronoi generator");
}

vem::StudyConfig load_study(const CommonArgs& args, const std::string& study)
{
    vem::Config cfg = args.config_path.empty() ? vem::Config{}
                                               : vem::Config::parse_file(args.config_path);
    cfg.set("study", study);
    if (!args.out_dir.empty())
        cfg.set("out_dir", args.out_dir);
    if (args.threads > 0)
        cfg.set("threads", std::to_string(args.threads));
    if (args.seed >= 0)
        cfg.set("seed", std::to_string(args.seed));
    return vem::study_config_from(cfg);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"2D virtual element solver for nonlinear elastic and inelastic solids"};
    app.require_subcommand(1);

    CommonArgs convergence_args, strip_args, block_args, solve_args;
    CLI::App* convergence =
        app.add_subcommand("convergence", "manufactured-solution convergence study");
    add_common(convergence, convergence_args);
    CLI::App* strip = app.add_subcommand("strip", "perforated strip plasticity study");
    add_common(strip, strip_args);
    CLI::App* block = app.add_subcommand("block", "finite-strain block study");
    add_common(block, block_args);
    CLI::App* solve = app.add_subcommand("solve", "single solve on a mesh");
    add_common(solve, solve_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (convergence->parsed())
            return vem::run_study(load_study(convergence_args, "convergence"));
        if (strip->parsed())
            return vem::run_study(load_study(strip_args, "plasticity_strip"));
        if (block->parsed())
            return vem::run_study(load_study(block_args, "finite_strain_block"));
        if (solve->parsed())
            return vem::run_study(load_study(solve_args, "single_solve"));
    } catch (const vem::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
