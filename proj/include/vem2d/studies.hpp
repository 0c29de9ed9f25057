#pragma once

#include "vem2d/analysis.hpp"
#include "vem2d/config.hpp"
#include "vem2d/constitutive.hpp"
#include "vem2d/generators.hpp"
#include "vem2d/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vem {

struct StudyConfig {
    std::string study = "convergence"; // convergence | plasticity_strip | finite_strain_block | single_solve
    std::string mesh_family = "square"; // square | trapezoid | hex | voronoi | triangle
    std::vector<int> refinements;       // N (structured), cell counts (voronoi), levels (strip)
    std::string case_name = "benchmark"; // hencky | benchmark | case1 | case2
    int load_steps = 10;
    NewtonOptions newton;
    std::string alpha_mode = "updated"; // updated | fixed
    std::optional<Real> alpha_fixed_value; // default: alpha evaluated once at u = 0
    NeoHookeanVariant neo_variant = NeoHookeanVariant::log_j;
    std::uint64_t seed = 0;
    std::string out_dir; // empty -> no files written

    // plasticity strip
    StripGeometry strip_geom;
    Real delta = 10.0;
    J2Params j2;
    int strip_reference_level = -1; // default: one past the finest level

    // finite strain block (SI units)
    Real block_mu = 2.6316e10;
    Real block_lambda = 5.1086e10;
    Real block_fx = 10.5e10;

    // single solve
    std::string mesh_file;
    std::string law_name = "linear"; // linear | hencky | benchmark | neo_hookean | j2
    Real lambda = 1.0;
    Real mu = 1.0;
    Vec2 body_force = Vec2::Zero();
    std::string clamp = "all"; // boundary labels to clamp, or "all"
};

StudyConfig study_config_from(const Config& cfg);

ManufacturedCase manufactured_case(const std::string& name);

PolyMesh make_family_mesh(const std::string& family, int N, std::uint64_t seed);

struct ConvergenceStudyResult {
    std::vector<ConvergenceRow> rows;
    std::vector<Real> einf_updated; // cases 1-2 only
    std::vector<Real> einf_fixed;
    std::vector<std::string> row_errors; // empty string = row ok
    std::string csv;
    std::string einf_csv;
    bool ok = false;
};

ConvergenceStudyResult run_convergence_study(const StudyConfig& cfg);

struct StripRow {
    std::string name;
    int N_h = 0;
    Real displ_a = 0.0;
    Real displ_b = 0.0;
    Real sigma_max = 0.0;
    Real sigma_total = 0.0;
    Real min_gamma = 0.0;
    Real max_abs_tr_plastic = 0.0;
};

struct StripResult {
    std::vector<StripRow> rows; // one per level, then the triangular reference
    bool ok = false;
    std::string error;
};

StripResult run_plasticity_strip(const StudyConfig& cfg);

struct BlockRow {
    int N_h = 0;
    Real ux = 0.0;
    Real uy = 0.0;
    bool ok = false;
    std::string error;
};

struct BlockResult {
    std::vector<BlockRow> rows;
    bool ok = false;
};

BlockResult run_finite_strain_block(const StudyConfig& cfg);

int run_single_solve(const StudyConfig& cfg);

// Dispatches on cfg.study; returns a process exit status.
int run_study(const StudyConfig& cfg);

} // namespace vem
