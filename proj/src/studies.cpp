#include "vem2d/studies.hpp"

#include "vem2d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace vem {

namespace {

constexpr Real kPi = std::numbers::pi;

void write_text(const std::string& out_dir, const std::string& name, const std::string& text)
{
    if (out_dir.empty())
        return;
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/" + name, std::ios::binary);
    if (!out)
        throw InvalidConfigError("cannot write output file '" + out_dir + "/" + name + "'");
    out << text;
}

std::string format_real(Real v)
{
    std::ostringstream s;
    s.precision(12);
    s << std::scientific << v;
    return s.str();
}

int nearest_vertex(const PolyMesh& mesh, const Vec2& p)
{
    int best = 0;
    Real best_d = (mesh.vertices[0] - p).squaredNorm();
    for (int v = 1; v < mesh.num_vertices(); ++v) {
        const Real d = (mesh.vertices[v] - p).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    return best;
}

std::vector<std::uint8_t> boundary_vertex_mask(const PolyMesh& mesh)
{
    std::vector<std::uint8_t> mask(mesh.num_vertices(), 0);
    for (const auto& be : mesh.boundary_edges) {
        mask[be.a] = 1;
        mask[be.b] = 1;
    }
    return mask;
}

Real fixed_alpha_at_zero(const PolyMesh& mesh, const ConstitutiveLaw& law, AlphaNorm norm)
{
    const ElementGeometry g = element_geometry(mesh, 0);
    return alpha_param(law, VecX::Zero(2 * g.num_vertices()), g, norm);
}

// Convergence solve for one mesh: homogeneous-solution Dirichlet data on the
// whole boundary, manufactured body force.
VecX solve_manufactured(const PolyMesh& mesh, const ManufacturedCase& mc, int load_steps,
                        NewtonOptions newton)
{
    DisplacementField field = DisplacementField::zero(mesh);
    const auto on_boundary = boundary_vertex_mask(mesh);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!on_boundary[v])
            continue;
        const Vec2 uv = mc.u(mesh.vertices[v]);
        field.bc.prescribe(v, 0, uv.x());
        field.bc.prescribe(v, 1, uv.y());
    }
    Solver solver(mesh, *mc.law, field.bc, newton);
    LoadProgram program;
    program.n_steps = load_steps;
    program.body_force = manufactured_body_force_field(mc);
    IncrementalResult result = solver.incremental_solve(program);
    if (!result.converged)
        throw StepFailureError(result.failed_step, result.error);
    return result.u.values;
}

} // namespace

ManufacturedCase manufactured_case(const std::string& name)
{
    ManufacturedCase mc;
    if (name == "hencky" || name == "benchmark") {
        const Real amp = name == "hencky" ? 1.0 : 10.0;
        mc.u = [amp](const Vec2& x) {
            const Real s = amp * std::sin(kPi * x.x()) * std::sin(kPi * x.y());
            return Vec2(s, s);
        };
        mc.grad_u = [amp](const Vec2& x) {
            const Real dx = amp * kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y());
            const Real dy = amp * kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y());
            Mat2 g;
            g << dx, dy, dx, dy;
            return g;
        };
        mc.law = name == "hencky"
                     ? std::shared_ptr<const ConstitutiveLaw>(std::make_shared<HenckyVonMises>())
                     : std::shared_ptr<const ConstitutiveLaw>(std::make_shared<BenchmarkLaw>());
        return mc;
    }
    if (name == "case1" || name == "case2") {
        const Real amp = name == "case1" ? 1.0 : 80.0;
        mc.u = [amp](const Vec2& x) {
            const Real s = amp * x.x() * (1.0 - x.x()) * x.y() * (1.0 - x.y());
            return Vec2(s, s);
        };
        mc.grad_u = [amp](const Vec2& x) {
            const Real dx = amp * (1.0 - 2.0 * x.x()) * x.y() * (1.0 - x.y());
            const Real dy = amp * x.x() * (1.0 - x.x()) * (1.0 - 2.0 * x.y());
            Mat2 g;
            g << dx, dy, dx, dy;
            return g;
        };
        mc.law = std::make_shared<BenchmarkLaw>();
        return mc;
    }
    throw InvalidConfigError("unknown manufactured case '" + name + "'");
}

PolyMesh make_family_mesh(const std::string& family, int N, std::uint64_t seed)
{
    if (family == "square")
        return generate_structured(StructuredKind::square, N);
    if (family == "trapezoid")
        return generate_structured(StructuredKind::trapezoid, N);
    if (family == "hex")
        return generate_structured(StructuredKind::hex_structured, N);
    if (family == "voronoi")
        return voronoi_lloyd(N, seed);
    if (family == "triangle")
        return triangulate(generate_structured(StructuredKind::square, N));
    throw InvalidConfigError("unknown mesh family '" + family + "'");
}

StudyConfig study_config_from(const Config& cfg)
{
    StudyConfig sc;
    sc.study = cfg.get_string("study", sc.study);
    sc.mesh_family = cfg.get_string("mesh_family", sc.mesh_family);
    sc.refinements = cfg.get_int_list("refinements");
    sc.case_name = cfg.get_string("case", sc.case_name);
    sc.load_steps = cfg.get_int("load_steps", sc.load_steps);
    sc.newton.tol_rel = cfg.get_real("newton_tol_rel", sc.newton.tol_rel);
    sc.newton.tol_abs = cfg.get_real("newton_tol_abs", sc.newton.tol_abs);
    sc.newton.max_iter = cfg.get_int("newton_max_iter", sc.newton.max_iter);
    sc.newton.threads = cfg.get_int("threads", sc.newton.threads);
    const std::string norm = cfg.get_string("alpha_norm", "max");
    if (norm == "max")
        sc.newton.alpha_norm = AlphaNorm::max_abs;
    else if (norm == "frobenius")
        sc.newton.alpha_norm = AlphaNorm::frobenius;
    else
        throw InvalidConfigError("alpha_norm must be 'max' or 'frobenius'");
    const std::string rule = cfg.get_string("load_rule", "vertex");
    if (rule == "vertex")
        sc.newton.load_rule = LoadRule::vertex;
    else if (rule == "projected")
        sc.newton.load_rule = LoadRule::projected;
    else
        throw InvalidConfigError("load_rule must be 'vertex' or 'projected'");
    sc.alpha_mode = cfg.get_string("alpha_mode", sc.alpha_mode);
    if (sc.alpha_mode != "updated" && sc.alpha_mode != "fixed")
        throw InvalidConfigError("alpha_mode must be 'updated' or 'fixed'");
    if (cfg.has("alpha_fixed_value"))
        sc.alpha_fixed_value = cfg.get_real("alpha_fixed_value", 0.0);
    const std::string variant = cfg.get_string("neo_hookean_variant", "log");
    if (variant == "log")
        sc.neo_variant = NeoHookeanVariant::log_j;
    else if (variant == "as_printed")
        sc.neo_variant = NeoHookeanVariant::as_printed;
    else
        throw InvalidConfigError("neo_hookean_variant must be 'log' or 'as_printed'");
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
    sc.out_dir = cfg.get_string("out_dir", sc.out_dir);

    sc.delta = cfg.get_real("delta", sc.delta);
    sc.j2.E = cfg.get_real("E", sc.j2.E);
    sc.j2.nu = cfg.get_real("nu", sc.j2.nu);
    sc.j2.sigma_y0 = cfg.get_real("sigma_y0", sc.j2.sigma_y0);
    sc.j2.H_iso = cfg.get_real("H_iso", sc.j2.H_iso);
    sc.j2.H_kin = cfg.get_real("H_kin", sc.j2.H_kin);
    sc.strip_reference_level = cfg.get_int("strip_reference_level", sc.strip_reference_level);

    sc.block_mu = cfg.get_real("block_mu", sc.block_mu);
    sc.block_lambda = cfg.get_real("block_lambda", sc.block_lambda);
    sc.block_fx = cfg.get_real("block_fx", sc.block_fx);

    sc.mesh_file = cfg.get_string("mesh_file", sc.mesh_file);
    sc.law_name = cfg.get_string("law", sc.law_name);
    sc.lambda = cfg.get_real("lambda", sc.lambda);
    sc.mu = cfg.get_real("mu", sc.mu);
    sc.body_force = Vec2(cfg.get_real("fx", 0.0), cfg.get_real("fy", 0.0));
    sc.clamp = cfg.get_string("clamp", sc.clamp);

    for (size_t k = 1; k < sc.refinements.size(); ++k)
        if (sc.refinements[k] <= sc.refinements[k - 1])
            throw InvalidConfigError("refinement list must be strictly increasing");
    if (!sc.mesh_file.empty() && !std::filesystem::exists(sc.mesh_file))
        throw InvalidConfigError("mesh_file '" + sc.mesh_file + "' does not exist");
    return sc;
}

ConvergenceStudyResult run_convergence_study(const StudyConfig& cfg)
{
    if (cfg.refinements.empty())
        throw InvalidConfigError("convergence study needs a non-empty refinement list");
    const ManufacturedCase mc = manufactured_case(cfg.case_name);
    const bool dual_alpha = cfg.case_name == "case1" || cfg.case_name == "case2";

    ConvergenceStudyResult result;
    result.ok = true;
    std::ostringstream einf;
    einf << "N_h,E_inf_updated,E_inf_fixed\n";

    for (int N : cfg.refinements) {
        try {
            const PolyMesh mesh = make_family_mesh(cfg.mesh_family, N, cfg.seed);
            NewtonOptions newton = cfg.newton;
            if (cfg.alpha_mode == "fixed")
                newton.fixed_alpha = cfg.alpha_fixed_value
                                         ? *cfg.alpha_fixed_value
                                         : fixed_alpha_at_zero(mesh, *mc.law, newton.alpha_norm);
            const VecX u_h = solve_manufactured(mesh, mc, cfg.load_steps, newton);

            ConvergenceRow row;
            row.N_h = mesh.num_vertices();
            row.E_0inf = error_0_inf(mesh, u_h, mc.u);
            row.E_12 = error_1_2(mesh, u_h, mc.u, mc.grad_u);
            result.rows.push_back(row);
            result.row_errors.emplace_back();

            if (dual_alpha) {
                result.einf_updated.push_back(error_inf_relative(mesh, u_h, mc.u));
                NewtonOptions fixed = cfg.newton;
                fixed.fixed_alpha = cfg.alpha_fixed_value
                                        ? *cfg.alpha_fixed_value
                                        : fixed_alpha_at_zero(mesh, *mc.law, fixed.alpha_norm);
                const VecX u_fixed = solve_manufactured(mesh, mc, cfg.load_steps, fixed);
                result.einf_fixed.push_back(error_inf_relative(mesh, u_fixed, mc.u));
                einf << mesh.num_vertices() << "," << format_real(result.einf_updated.back())
                     << "," << format_real(result.einf_fixed.back()) << "\n";
            }
        } catch (const Error& e) {
            result.row_errors.emplace_back(e.what());
            result.ok = false;
            std::cerr << "refinement " << N << " failed: " << e.what() << "\n";
        }
    }

    fill_rates(result.rows);
    result.csv = convergence_csv(result.rows);
    if (dual_alpha)
        result.einf_csv = einf.str();

    const std::string stem = cfg.mesh_family + "_" + cfg.case_name;
    write_text(cfg.out_dir, "convergence_" + stem + ".csv", result.csv);
    if (dual_alpha)
        write_text(cfg.out_dir, "einf_" + stem + ".csv", result.einf_csv);
    std::cout << result.csv;
    return result;
}

namespace {

StripRow strip_report_row(const std::string& name, const PolyMesh& mesh,
                          const IncrementalResult& result, const StripGeometry& geom)
{
    StripRow row;
    row.name = name;
    row.N_h = mesh.num_vertices();
    row.displ_a = result.u.at(nearest_vertex(mesh, Vec2(0.0, geom.R))).y();
    row.displ_b = result.u.at(nearest_vertex(mesh, Vec2(geom.R, 0.0))).x();
    row.min_gamma = 0.0;
    row.max_abs_tr_plastic = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Real amp = result.element_stress[c].norm();
        row.sigma_max = std::max(row.sigma_max, amp);
        row.sigma_total += element_geometry(mesh, c).area * amp;
        const MaterialState& st = result.states[c];
        row.min_gamma = std::min(row.min_gamma, st.gamma);
        row.max_abs_tr_plastic =
            std::max(row.max_abs_tr_plastic,
                     std::abs(st.plastic_strain(0) + st.plastic_strain(1) + st.plastic_strain(2)));
    }
    return row;
}

IncrementalResult solve_strip(const PolyMesh& mesh, const StudyConfig& cfg)
{
    DisplacementField field = DisplacementField::zero(mesh);
    for (const auto& be : mesh.boundary_edges) {
        for (int v : {be.a, be.b}) {
            if (be.label == "sym_x")
                field.bc.prescribe(v, 0, 0.0);
            else if (be.label == "sym_y")
                field.bc.prescribe(v, 1, 0.0);
            else if (be.label == "top")
                field.bc.prescribe(v, 1, cfg.delta);
        }
    }
    // the corner vertex shared by sym_x and top keeps both constraints
    const J2Plasticity law(cfg.j2);
    Solver solver(mesh, law, field.bc, cfg.newton);
    LoadProgram program;
    program.n_steps = cfg.load_steps;
    return solver.incremental_solve(program);
}

std::string strip_csv(const std::vector<StripRow>& rows)
{
    std::ostringstream out;
    out << "mesh,N_h,displ_A,displ_B,sigma_max,sigma_T\n";
    for (const auto& r : rows)
        out << r.name << "," << r.N_h << "," << format_real(r.displ_a) << ","
            << format_real(r.displ_b) << "," << format_real(r.sigma_max) << ","
            << format_real(r.sigma_total) << "\n";
    return out.str();
}

std::string gamma_csv(const PolyMesh& mesh, const IncrementalResult& result)
{
    std::ostringstream out;
    out << "element,centroid_x,centroid_y,gamma\n";
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const ElementGeometry g = element_geometry(mesh, c);
        out << c << "," << format_real(g.centroid.x()) << "," << format_real(g.centroid.y()) << ","
            << format_real(result.states[c].gamma) << "\n";
    }
    return out.str();
}

} // namespace

StripResult run_plasticity_strip(const StudyConfig& cfg)
{
    std::vector<int> levels = cfg.refinements;
    if (levels.empty())
        levels = {0, 1, 2};
    StripResult result;
    result.ok = true;

    for (int level : levels) {
        const PolyMesh mesh = quarter_strip_mesh(level, cfg.strip_geom);
        const IncrementalResult run = solve_strip(mesh, cfg);
        if (!run.converged) {
            result.ok = false;
            result.error = "level " + std::to_string(level) + ": " + run.error;
            break;
        }
        result.rows.push_back(strip_report_row("L" + std::to_string(level), mesh, run,
                                               cfg.strip_geom));
        write_text(cfg.out_dir, "strip_gamma_L" + std::to_string(level) + ".csv",
                   gamma_csv(mesh, run));
    }

    if (result.ok) {
        const int ref_level =
            cfg.strip_reference_level >= 0 ? cfg.strip_reference_level : levels.back() + 1;
        const PolyMesh tri = triangulate(quarter_strip_mesh(ref_level, cfg.strip_geom));
        const IncrementalResult run = solve_strip(tri, cfg);
        if (!run.converged) {
            result.ok = false;
            result.error = "triangular reference: " + run.error;
        } else {
            result.rows.push_back(strip_report_row("reference", tri, run, cfg.strip_geom));
            write_text(cfg.out_dir, "strip_gamma_reference.csv", gamma_csv(tri, run));
        }
    }

    write_text(cfg.out_dir, "strip_report.csv", strip_csv(result.rows));
    std::cout << strip_csv(result.rows);
    if (!result.ok)
        std::cerr << result.error << "\n";
    return result;
}

BlockResult run_finite_strain_block(const StudyConfig& cfg)
{
    std::vector<int> sizes = cfg.refinements;
    if (sizes.empty())
        sizes = {6, 13, 27, 54};
    const NeoHookean law(cfg.block_lambda, cfg.block_mu, cfg.neo_variant);

    BlockResult result;
    result.ok = true;
    std::ostringstream report;
    report << "N_h,ux_P,uy_P\n";

    for (int N : sizes) {
        const PolyMesh mesh = generate_structured(StructuredKind::square, N);
        BlockRow row;
        row.N_h = mesh.num_vertices();
        DisplacementField field = DisplacementField::zero(mesh);
        for (const auto& be : mesh.boundary_edges) {
            if (be.label != "left")
                continue;
            for (int v : {be.a, be.b}) {
                field.bc.prescribe(v, 0, 0.0);
                field.bc.prescribe(v, 1, 0.0);
            }
        }
        Solver solver(mesh, law, field.bc, cfg.newton);
        LoadProgram program;
        program.n_steps = cfg.load_steps;
        const Real fx = cfg.block_fx;
        program.body_force = [fx](const Vec2&) { return Vec2(fx, 0.0); };
        const IncrementalResult run = solver.incremental_solve(program);
        if (!run.converged) {
            row.ok = false;
            row.error = run.error + " (a larger load_steps value usually avoids this)";
            result.ok = false;
        } else {
            row.ok = true;
            const Vec2 uP = run.u.at(nearest_vertex(mesh, Vec2(1.0, 1.0)));
            row.ux = uP.x();
            row.uy = uP.y();
            report << row.N_h << "," << format_real(row.ux) << "," << format_real(row.uy) << "\n";
            if (N == sizes.back()) {
                std::ostringstream deformed;
                deformed << "x,y\n";
                for (int v = 0; v < mesh.num_vertices(); ++v) {
                    const Vec2 p = mesh.vertices[v] + run.u.at(v);
                    deformed << format_real(p.x()) << "," << format_real(p.y()) << "\n";
                }
                write_text(cfg.out_dir, "block_deformed.csv", deformed.str());
            }
        }
        result.rows.push_back(row);
    }

    write_text(cfg.out_dir, "block_report.csv", report.str());
    std::cout << report.str();
    for (const auto& row : result.rows)
        if (!row.ok)
            std::cerr << "N_h=" << row.N_h << " failed: " << row.error << "\n";
    return result;
}

int run_single_solve(const StudyConfig& cfg)
{
    PolyMesh mesh;
    if (!cfg.mesh_file.empty()) {
        std::ifstream in(cfg.mesh_file);
        std::ostringstream buf;
        buf << in.rdbuf();
        mesh = load_mesh(buf.str());
    } else {
        if (cfg.refinements.empty())
            throw InvalidConfigError("single_solve needs mesh_file or a refinement entry");
        mesh = make_family_mesh(cfg.mesh_family, cfg.refinements.front(), cfg.seed);
    }

    std::shared_ptr<const ConstitutiveLaw> law;
    if (cfg.law_name == "linear")
        law = std::make_shared<LinearElastic>(cfg.lambda, cfg.mu);
    else if (cfg.law_name == "hencky")
        law = std::make_shared<HenckyVonMises>();
    else if (cfg.law_name == "benchmark")
        law = std::make_shared<BenchmarkLaw>();
    else if (cfg.law_name == "neo_hookean")
        law = std::make_shared<NeoHookean>(cfg.lambda, cfg.mu, cfg.neo_variant);
    else if (cfg.law_name == "j2")
        law = std::make_shared<J2Plasticity>(cfg.j2);
    else
        throw InvalidConfigError("unknown law '" + cfg.law_name + "'");

    DisplacementField field = DisplacementField::zero(mesh);
    for (const auto& be : mesh.boundary_edges) {
        if (cfg.clamp != "all" && cfg.clamp.find(be.label) == std::string::npos)
            continue;
        for (int v : {be.a, be.b}) {
            field.bc.prescribe(v, 0, 0.0);
            field.bc.prescribe(v, 1, 0.0);
        }
    }

    Solver solver(mesh, *law, field.bc, cfg.newton);
    LoadProgram program;
    program.n_steps = cfg.load_steps;
    const Vec2 f = cfg.body_force;
    if (f.squaredNorm() > 0.0)
        program.body_force = [f](const Vec2&) { return f; };
    const IncrementalResult run = solver.incremental_solve(program);
    if (!run.converged) {
        std::cerr << "solve failed at step " << run.failed_step << ": " << run.error << "\n";
        return 1;
    }

    std::ostringstream out;
    out << "vertex,x,y,ux,uy\n";
    for (int v = 0; v < mesh.num_vertices(); ++v)
        out << v << "," << format_real(mesh.vertices[v].x()) << ","
            << format_real(mesh.vertices[v].y()) << "," << format_real(run.u.at(v).x()) << ","
            << format_real(run.u.at(v).y()) << "\n";
    write_text(cfg.out_dir, "solution.csv", out.str());
    std::cout << "solved " << mesh.num_cells() << " cells, " << mesh.num_vertices()
              << " vertices\n";
    return 0;
}

int run_study(const StudyConfig& cfg)
{
    if (cfg.study == "convergence")
        return run_convergence_study(cfg).ok ? 0 : 1;
    if (cfg.study == "plasticity_strip")
        return run_plasticity_strip(cfg).ok ? 0 : 1;
    if (cfg.study == "finite_strain_block")
        return run_finite_strain_block(cfg).ok ? 0 : 1;
    if (cfg.study == "single_solve")
        return run_single_solve(cfg);
    throw InvalidConfigError("unknown study '" + cfg.study + "'");
}

} // namespace vem
