#include "vem2d/solver.hpp"

#include "vem2d/errors.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <thread>

namespace vem {

Constraints Constraints::none(int num_vertices)
{
    Constraints c;
    c.prescribed.assign(2 * static_cast<size_t>(num_vertices), 0);
    c.base = VecX::Zero(2 * num_vertices);
    return c;
}

void Constraints::prescribe(int vertex, int component, Real value)
{
    prescribed.at(2 * static_cast<size_t>(vertex) + component) = 1;
    base(2 * vertex + component) = value;
}

int Constraints::num_free() const
{
    int n = 0;
    for (auto p : prescribed)
        n += p == 0;
    return n;
}

DisplacementField DisplacementField::zero(const PolyMesh& mesh)
{
    DisplacementField f;
    f.values = VecX::Zero(2 * mesh.num_vertices());
    f.bc = Constraints::none(mesh.num_vertices());
    return f;
}

void apply_dirichlet(DisplacementField& field, Real scale)
{
    for (size_t d = 0; d < field.bc.prescribed.size(); ++d)
        if (field.bc.prescribed[d])
            field.values(static_cast<Eigen::Index>(d)) = scale * field.bc.base(static_cast<Eigen::Index>(d));
}

Solver::Solver(const PolyMesh& mesh, const ConstitutiveLaw& law, Constraints bc,
               NewtonOptions options)
    : mesh_(&mesh), law_(&law), bc_(std::move(bc)), options_(options)
{
    if (bc_.prescribed.size() != 2 * static_cast<size_t>(mesh.num_vertices()))
        throw InvalidInputError("solver: constraint table does not match the mesh");
    ops_.reserve(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c)
        ops_.push_back(build_element_ops(element_geometry(mesh, c)));

    free_index_.assign(bc_.prescribed.size(), -1);
    for (size_t d = 0; d < bc_.prescribed.size(); ++d)
        if (!bc_.prescribed[d])
            free_index_[d] = n_free_++;
}

namespace {

// degree-5 Gauss rule on the reference triangle (barycentric points/weights)
struct TriQuadPoint {
    Real l1, l2, l3, w;
};
constexpr TriQuadPoint kTriQuad[7] = {
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
};

} // namespace

VecX Solver::external_load(const BodyForce& f) const
{
    VecX load = VecX::Zero(2 * mesh_->num_vertices());
    if (!f)
        return load;

    if (options_.load_rule == LoadRule::vertex) {
        VecX weight = VecX::Zero(mesh_->num_vertices());
        for (int c = 0; c < mesh_->num_cells(); ++c) {
            const auto& loop = mesh_->cells[c];
            if (!ops_[c].star_shaped)
                throw UnsupportedElementError("external_load: cell " + std::to_string(c) +
                                              " is not star-shaped w.r.t. its vertex centroid");
            for (size_t k = 0; k < loop.size(); ++k)
                weight(loop[k]) += ops_[c].load_weights(static_cast<Eigen::Index>(k));
        }
        for (int v = 0; v < mesh_->num_vertices(); ++v)
            load.segment<2>(2 * v) = weight(v) * f(mesh_->vertices[v]);
        return load;
    }

    // int_E f . Pi_nabla(v) = mean(v) . int_E f + (Pi0 grad v) : int_E f (x) (x - centroid)
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto& loop = mesh_->cells[c];
        const int n = static_cast<int>(loop.size());
        if (!ops_[c].star_shaped)
            throw UnsupportedElementError("external_load: cell " + std::to_string(c) +
                                          " is not star-shaped w.r.t. its vertex centroid");
        Vec2 centroid = Vec2::Zero();
        for (int k = 0; k < n; ++k)
            centroid += mesh_->vertices[loop[k]];
        centroid /= n;
        Vec2 f_int = Vec2::Zero();
        Mat2 m_int = Mat2::Zero();
        for (int k = 0; k < n; ++k) {
            const Vec2& a = mesh_->vertices[loop[k]];
            const Vec2& b = mesh_->vertices[loop[(k + 1) % n]];
            const Real area = 0.5 * cross2(a - centroid, b - centroid);
            for (const auto& q : kTriQuad) {
                const Vec2 x = q.l1 * centroid + q.l2 * a + q.l3 * b;
                const Vec2 fx = f(x);
                f_int += area * q.w * fx;
                m_int += area * q.w * fx * (x - centroid).transpose();
            }
        }
        for (int k = 0; k < n; ++k) {
            const Vec2 g(ops_[c].grad_op(0, 2 * k), ops_[c].grad_op(1, 2 * k));
            load.segment<2>(2 * loop[k]) += f_int / n + m_int * g;
        }
    }
    return load;
}

std::vector<Real> Solver::stabilization_alphas(const VecX& s,
                                               const std::vector<MaterialState>* states) const
{
    std::vector<Real> alphas(ops_.size());
    if (options_.fixed_alpha) {
        std::fill(alphas.begin(), alphas.end(), *options_.fixed_alpha);
        return alphas;
    }
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto& loop = mesh_->cells[c];
        const Mat2 grad_s = mat2(ops_[c].grad_op * [&] {
            VecX se(2 * loop.size());
            for (size_t k = 0; k < loop.size(); ++k)
                se.segment<2>(2 * static_cast<Eigen::Index>(k)) = s.segment<2>(2 * loop[k]);
            return se;
        }());
        const ConstitutiveResponse resp =
            states ? law_->evaluate_step(grad_s, (*states)[c], grad_s) : law_->evaluate(grad_s);
        if (!resp.tangent.allFinite())
            throw InvalidStateError("stabilization_alphas: non-finite tangent on cell " +
                                    std::to_string(c));
        const Real a = options_.alpha_norm == AlphaNorm::max_abs
                           ? resp.tangent.cwiseAbs().maxCoeff()
                           : resp.tangent.norm();
        if (!(a > 0.0))
            throw InvalidStateError("stabilization_alphas: non-positive tangent norm on cell " +
                                    std::to_string(c));
        alphas[c] = a;
    }
    return alphas;
}

SystemMatrices Solver::assemble(const VecX& u, const std::vector<Real>& alphas,
                                const std::vector<MaterialState>* states, const VecX* u_old,
                                const VecX& ext_load, Real load_scale) const
{
    const int nc = mesh_->num_cells();
    if (states && static_cast<int>(states->size()) != nc)
        throw InvalidInputError("assemble: state collection does not match the mesh");

    SystemMatrices sys;
    sys.residual = -load_scale * ext_load;
    sys.element_stress.resize(nc);
    sys.element_stress_zz.assign(nc, 0.0);
    if (states)
        sys.states.resize(nc);

    struct Chunk {
        std::vector<Eigen::Triplet<Real>> triplets;
        VecX internal;
        std::string error;
    };
    const int n_threads = std::max(1, options_.threads);
    const int chunk_count = std::min<int>(n_threads, nc);
    std::vector<Chunk> chunks(chunk_count);

    const auto run_chunk = [&](int ci) {
        Chunk& chunk = chunks[ci];
        chunk.internal = VecX::Zero(sys.residual.size());
        const int begin = static_cast<int>(static_cast<long>(nc) * ci / chunk_count);
        const int end = static_cast<int>(static_cast<long>(nc) * (ci + 1) / chunk_count);
        try {
            for (int c = begin; c < end; ++c) {
                const auto& loop = mesh_->cells[c];
                const int n = static_cast<int>(loop.size());
                VecX ue(2 * n), uoe;
                for (int k = 0; k < n; ++k)
                    ue.segment<2>(2 * k) = u.segment<2>(2 * loop[k]);
                if (u_old) {
                    uoe.resize(2 * n);
                    for (int k = 0; k < n; ++k)
                        uoe.segment<2>(2 * k) = u_old->segment<2>(2 * loop[k]);
                }
                const LocalResult local =
                    local_eval(*law_, ops_[c], ue, alphas[c], true,
                               states ? &(*states)[c] : nullptr, u_old ? &uoe : nullptr);
                sys.element_stress[c] = local.stress;
                if (local.stress_zz)
                    sys.element_stress_zz[c] = *local.stress_zz;
                if (states)
                    sys.states[c] = local.new_state ? *local.new_state : (*states)[c];

                for (int k = 0; k < n; ++k)
                    chunk.internal.segment<2>(2 * loop[k]) += local.force.segment<2>(2 * k);
                for (int kr = 0; kr < 2 * n; ++kr) {
                    const int gr = 2 * loop[kr / 2] + kr % 2;
                    const int fr = free_index_[gr];
                    if (fr < 0)
                        continue;
                    for (int kc = 0; kc < 2 * n; ++kc) {
                        const int gc = 2 * loop[kc / 2] + kc % 2;
                        const int fc = free_index_[gc];
                        if (fc >= 0)
                            chunk.triplets.emplace_back(fr, fc, local.tangent(kr, kc));
                    }
                }
            }
        } catch (const Error& e) {
            chunk.error = std::string("element ") + std::to_string(begin) + "-" +
                          std::to_string(end - 1) + ": " + e.what();
        }
    };

    if (chunk_count == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(chunk_count);
        for (int ci = 0; ci < chunk_count; ++ci)
            pool.emplace_back(run_chunk, ci);
        for (auto& t : pool)
            t.join();
    }

    // deterministic ordered reduction
    std::vector<Eigen::Triplet<Real>> triplets;
    size_t total = 0;
    for (const auto& chunk : chunks)
        total += chunk.triplets.size();
    triplets.reserve(total);
    for (auto& chunk : chunks) {
        if (!chunk.error.empty())
            throw InvertedElementError("assemble failed: " + chunk.error);
        sys.residual += chunk.internal;
        triplets.insert(triplets.end(), chunk.triplets.begin(), chunk.triplets.end());
    }
    sys.tangent_free.resize(n_free_, n_free_);
    sys.tangent_free.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

VecX Solver::solve_linear(const SpMat& K, const VecX& rhs) const
{
    VecX x;
    if (law_->symmetric_tangent()) {
        Eigen::SimplicialLDLT<SpMat> ldlt(K);
        if (ldlt.info() != Eigen::Success)
            throw SingularSystemError("sparse LDLT factorization failed");
        x = ldlt.solve(rhs);
    } else {
        Eigen::SparseLU<SpMat> lu(K);
        if (lu.info() != Eigen::Success)
            throw SingularSystemError("sparse LU factorization failed");
        x = lu.solve(rhs);
    }
    if (!x.allFinite())
        throw SingularSystemError("linear solve produced non-finite increments");
    return x;
}

namespace {

Real free_norm(const VecX& residual, const std::vector<int>& free_index)
{
    Real sum = 0.0;
    for (size_t d = 0; d < free_index.size(); ++d)
        if (free_index[d] >= 0)
            sum += residual(static_cast<Eigen::Index>(d)) * residual(static_cast<Eigen::Index>(d));
    return std::sqrt(sum);
}

} // namespace

NewtonLog Solver::newton_solve(DisplacementField& u, const VecX& s,
                               std::vector<MaterialState>* states, const VecX* u_old,
                               const VecX& ext_load, Real load_scale,
                               SystemMatrices* final_system) const
{
    const std::vector<Real> alphas = stabilization_alphas(s, states);
    SystemMatrices sys = assemble(u.values, alphas, states, u_old, ext_load, load_scale);

    NewtonLog log;
    Real norm = free_norm(sys.residual, free_index_);
    log.residual_norms.push_back(norm);
    const Real tol = options_.tol_rel * norm + options_.tol_abs;

    while (norm > tol) {
        if (log.iterations >= options_.max_iter)
            throw NonConvergenceError("Newton did not converge within " +
                                          std::to_string(options_.max_iter) + " iterations",
                                      log.residual_norms);
        VecX rhs(n_free_);
        for (size_t d = 0; d < free_index_.size(); ++d)
            if (free_index_[d] >= 0)
                rhs(free_index_[d]) = -sys.residual(static_cast<Eigen::Index>(d));
        const VecX du = solve_linear(sys.tangent_free, rhs);
        for (size_t d = 0; d < free_index_.size(); ++d)
            if (free_index_[d] >= 0)
                u.values(static_cast<Eigen::Index>(d)) += du(free_index_[d]);
        ++log.iterations;
        sys = assemble(u.values, alphas, states, u_old, ext_load, load_scale);
        norm = free_norm(sys.residual, free_index_);
        log.residual_norms.push_back(norm);
    }

    // history committed only on convergence
    if (states)
        *states = sys.states;
    if (final_system)
        *final_system = std::move(sys);
    return log;
}

IncrementalResult Solver::incremental_solve(const LoadProgram& program) const
{
    if (program.n_steps < 1)
        throw InvalidParameterError("load program needs at least one step");

    IncrementalResult result;
    result.u.values = VecX::Zero(2 * mesh_->num_vertices());
    result.u.bc = bc_;
    if (law_->uses_history())
        result.states.assign(mesh_->num_cells(), MaterialState{});

    const VecX ext_load = external_load(program.body_force);

    for (int n = 1; n <= program.n_steps; ++n) {
        const Real scale = static_cast<Real>(n) / program.n_steps;
        const VecX u_prev = result.u.values;
        apply_dirichlet(result.u, scale);
        std::vector<MaterialState>* states = result.states.empty() ? nullptr : &result.states;
        try {
            SystemMatrices sys;
            NewtonLog log = newton_solve(result.u, u_prev, states,
                                         law_->uses_history() ? &u_prev : nullptr, ext_load,
                                         scale, &sys);
            result.logs.push_back(std::move(log));
            result.history.push_back(result.u.values);
            result.element_stress = std::move(sys.element_stress);
            result.element_stress_zz = std::move(sys.element_stress_zz);
        } catch (const Error& e) {
            result.u.values = u_prev; // roll back to the last converged step
            result.converged = false;
            result.failed_step = n;
            result.error = e.what();
            return result;
        }
    }
    result.converged = true;
    return result;
}

SystemMatrices assemble(const PolyMesh& mesh, const ConstitutiveLaw& law,
                        const DisplacementField& u, const DisplacementField& s,
                        const std::vector<MaterialState>* states, const DisplacementField* u_old,
                        const BodyForce& body_force, Real load_scale,
                        const NewtonOptions& options)
{
    Solver solver(mesh, law, u.bc, options);
    const std::vector<Real> alphas = solver.stabilization_alphas(s.values, states);
    return solver.assemble(u.values, alphas, states, u_old ? &u_old->values : nullptr,
                           solver.external_load(body_force), load_scale);
}

} // namespace vem
