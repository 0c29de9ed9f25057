#pragma once

#include "vem2d/element.hpp"
#include "vem2d/mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vem {

using BodyForce = std::function<Vec2(const Vec2&)>;

// Per-dof constraint table: prescribed dofs hold scale * base after
// apply_dirichlet; the rest are unknowns.
struct Constraints {
    std::vector<std::uint8_t> prescribed;
    VecX base;

    static Constraints none(int num_vertices);
    void prescribe(int vertex, int component, Real value);
    int num_free() const;
};

struct DisplacementField {
    VecX values; // 2 per vertex, interleaved (x0, y0, x1, y1, ...)
    Constraints bc;

    static DisplacementField zero(const PolyMesh& mesh);
    Vec2 at(int vertex) const { return values.segment<2>(2 * vertex); }
};

// Prescribed components set to scale * base; free components untouched.
void apply_dirichlet(DisplacementField& field, Real scale);

struct LoadProgram {
    int n_steps = 1;
    BodyForce body_force; // may be empty
};

struct SystemMatrices {
    SpMat tangent_free;              // global tangent restricted to free dofs
    VecX residual;                   // full residual; prescribed rows excluded from solves
    std::vector<MaterialState> states;
    std::vector<Mat2> element_stress;
    std::vector<Real> element_stress_zz;
};

// Body-force quadrature: the vertex rule sum omega_nu f(nu) v(nu), or the
// elementwise-exact integral of f against the projected test functions
// int_E f . Pi_nabla(v) (a Gauss rule on the centroid fan).
enum class LoadRule { vertex, projected };

struct NewtonOptions {
    Real tol_rel = 1e-10;
    Real tol_abs = 1e-12;
    int max_iter = 25;
    int threads = 1;
    AlphaNorm alpha_norm = AlphaNorm::max_abs;
    std::optional<Real> fixed_alpha; // constant stabilization scaling when set
    LoadRule load_rule = LoadRule::vertex;
};

struct NewtonLog {
    std::vector<Real> residual_norms; // starts with the initial residual
    int iterations = 0;
};

struct IncrementalResult {
    DisplacementField u;
    std::vector<MaterialState> states;
    std::vector<VecX> history; // converged displacement per load step
    std::vector<NewtonLog> logs;
    std::vector<Mat2> element_stress;
    std::vector<Real> element_stress_zz;
    bool converged = false;
    int failed_step = 0;
    std::string error;
};

// Global driver: caches the per-element operators and the free-dof numbering
// once per (mesh, constraints) pair.
class Solver {
public:
    Solver(const PolyMesh& mesh, const ConstitutiveLaw& law, Constraints bc,
           NewtonOptions options = {});

    const PolyMesh& mesh() const { return *mesh_; }
    const std::vector<ElementOps>& element_ops() const { return ops_; }
    const NewtonOptions& options() const { return options_; }

    // Vertex-quadrature load vector for the given body force at unit scale.
    VecX external_load(const BodyForce& f) const;

    std::vector<Real> stabilization_alphas(const VecX& s,
                                           const std::vector<MaterialState>* states) const;

    SystemMatrices assemble(const VecX& u, const std::vector<Real>& alphas,
                            const std::vector<MaterialState>* states, const VecX* u_old,
                            const VecX& ext_load, Real load_scale) const;

    // One incremental step: Newton from u (which must already satisfy the
    // step's prescribed values), stabilization frozen at s.
    NewtonLog newton_solve(DisplacementField& u, const VecX& s,
                           std::vector<MaterialState>* states, const VecX* u_old,
                           const VecX& ext_load, Real load_scale,
                           SystemMatrices* final_system = nullptr) const;

    IncrementalResult incremental_solve(const LoadProgram& program) const;

private:
    VecX solve_linear(const SpMat& K, const VecX& rhs) const;

    const PolyMesh* mesh_;
    const ConstitutiveLaw* law_;
    Constraints bc_;
    NewtonOptions options_;
    std::vector<ElementOps> ops_;
    std::vector<int> free_index_; // dof -> free slot, -1 when prescribed
    int n_free_ = 0;
};

// Spec-level assembly entry point; s supplies the stabilization state.
SystemMatrices assemble(const PolyMesh& mesh, const ConstitutiveLaw& law,
                        const DisplacementField& u, const DisplacementField& s,
                        const std::vector<MaterialState>* states = nullptr,
                        const DisplacementField* u_old = nullptr,
                        const BodyForce& body_force = {}, Real load_scale = 1.0,
                        const NewtonOptions& options = {});

} // namespace vem
