#include "vem2d/element.hpp"

#include "vem2d/errors.hpp"

#include <cmath>

namespace vem {

namespace {

// Per-vertex gradient coefficients: Pi0 grad v = sum_nu v(nu) (x) g_nu with
// g_nu = rot(p_next - p_prev) / (2|E|); the midpoint rule on each edge is
// exact for the edgewise-linear boundary trace.
std::vector<Vec2> gradient_coefficients(const ElementGeometry& geom)
{
    const int n = geom.num_vertices();
    std::vector<Vec2> g(n);
    for (int i = 0; i < n; ++i) {
        const Vec2& next = geom.vertex_coords[(i + 1) % n];
        const Vec2& prev = geom.vertex_coords[(i + n - 1) % n];
        g[i] = rot90cw(next - prev) / (2.0 * geom.area);
    }
    return g;
}

} // namespace

ElementOps build_element_ops(const ElementGeometry& geom)
{
    const int n = geom.num_vertices();
    const int nd = 2 * n;
    ElementOps ops;
    ops.area = geom.area;
    ops.diameter = geom.diameter;

    const auto g = gradient_coefficients(geom);
    ops.grad_op.setZero(4, nd);
    for (int nu = 0; nu < n; ++nu)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                ops.grad_op(2 * i + j, 2 * nu + i) = g[nu][j];

    // Pi_nabla v at vertex nu': mean(v) + (Pi0 grad v) (x_nu' - centroid)
    ops.pi_nabla_op.setZero(nd, nd);
    for (int nup = 0; nup < n; ++nup) {
        const Vec2 dx = geom.vertex_coords[nup] - geom.centroid;
        for (int i = 0; i < 2; ++i) {
            auto row = ops.pi_nabla_op.row(2 * nup + i);
            for (int nu = 0; nu < n; ++nu)
                row(2 * nu + i) += 1.0 / n;
            row += dx.x() * ops.grad_op.row(2 * i + 0);
            row += dx.y() * ops.grad_op.row(2 * i + 1);
        }
    }

    const MatX filter = MatX::Identity(nd, nd) - ops.pi_nabla_op;
    ops.stab = filter.transpose() * filter; // h_E^(d-2) = 1 for d = 2

    // centroid-fan load weights; signed sub-areas certify star-shapedness
    std::vector<Real> fan(n);
    bool star = true;
    for (int i = 0; i < n; ++i) {
        fan[i] = 0.5 * cross2(geom.vertex_coords[i] - geom.centroid,
                              geom.vertex_coords[(i + 1) % n] - geom.centroid);
        if (!(fan[i] > 1e-12 * geom.diameter * geom.diameter))
            star = false;
    }
    ops.star_shaped = star;
    if (star) {
        ops.load_weights.setZero(n);
        const Real centroid_share = geom.area / (3.0 * n);
        for (int i = 0; i < n; ++i) {
            ops.load_weights(i) += fan[i] / 3.0 + centroid_share;
            ops.load_weights((i + 1) % n) += fan[i] / 3.0;
        }
    }
    return ops;
}

Mat2 pi0_grad(const ElementGeometry& geom, const VecX& dofs)
{
    const int n = geom.num_vertices();
    if (dofs.size() != 2 * n)
        throw InvalidInputError("pi0_grad: dof vector size mismatch");
    const auto g = gradient_coefficients(geom);
    Mat2 result = Mat2::Zero();
    for (int nu = 0; nu < n; ++nu)
        result += dofs.segment<2>(2 * nu) * g[nu].transpose();
    return result;
}

VecX pi_nabla(const ElementGeometry& geom, const VecX& dofs)
{
    const int n = geom.num_vertices();
    if (dofs.size() != 2 * n)
        throw InvalidInputError("pi_nabla: dof vector size mismatch");
    const Mat2 grad = pi0_grad(geom, dofs);
    Vec2 mean = Vec2::Zero();
    for (int nu = 0; nu < n; ++nu)
        mean += dofs.segment<2>(2 * nu);
    mean /= n;
    VecX out(2 * n);
    for (int nu = 0; nu < n; ++nu)
        out.segment<2>(2 * nu) = mean + grad * (geom.vertex_coords[nu] - geom.centroid);
    return out;
}

MatX stab_matrix(const ElementGeometry& geom) { return build_element_ops(geom).stab; }

VecX vertex_load_weights(const ElementGeometry& geom)
{
    const ElementOps ops = build_element_ops(geom);
    if (!ops.star_shaped)
        throw UnsupportedElementError(
            "vertex_load_weights: element is not star-shaped w.r.t. its vertex centroid");
    return ops.load_weights;
}

Real alpha_param(const ConstitutiveLaw& law, const VecX& s_dofs, const ElementGeometry& geom,
                 AlphaNorm norm, const MaterialState* state)
{
    const Mat2 grad_s = pi0_grad(geom, s_dofs);
    const ConstitutiveResponse resp =
        state ? law.evaluate_step(grad_s, *state, grad_s) : law.evaluate(grad_s);
    if (!resp.tangent.allFinite())
        throw InvalidStateError("alpha_param: non-finite constitutive tangent");
    const Real alpha = norm == AlphaNorm::max_abs ? resp.tangent.cwiseAbs().maxCoeff()
                                                  : resp.tangent.norm();
    if (!(alpha > 0.0))
        throw InvalidStateError("alpha_param: tangent norm is not positive");
    return alpha;
}

LocalResult local_eval(const ConstitutiveLaw& law, const ElementOps& ops, const VecX& u,
                       Real alpha, bool want_tangent, const MaterialState* state,
                       const VecX* u_old)
{
    const Mat2 grad_u = mat2(ops.grad_op * u);

    ConstitutiveResponse resp;
    if (state) {
        if (!u_old)
            throw InvalidInputError("local_eval: inelastic mode needs the previous displacement");
        resp = law.evaluate_step(mat2(ops.grad_op * *u_old), *state, grad_u);
    } else {
        resp = law.evaluate(grad_u);
    }

    LocalResult out;
    out.stress = resp.stress;
    out.new_state = resp.new_state;
    out.stress_zz = resp.stress_zz;
    out.force = ops.area * (ops.grad_op.transpose() * vec4(resp.stress)) + alpha * (ops.stab * u);
    if (want_tangent)
        out.tangent = ops.area * (ops.grad_op.transpose() * resp.tangent * ops.grad_op) +
                      alpha * ops.stab;
    return out;
}

LocalResult local_residual(const ConstitutiveLaw& law, const ElementGeometry& geom, const VecX& u,
                           const VecX& s, const MaterialState* state, const VecX* u_old,
                           AlphaNorm norm)
{
    const ElementOps ops = build_element_ops(geom);
    const Real alpha = alpha_param(law, s, geom, norm, state);
    return local_eval(law, ops, u, alpha, false, state, u_old);
}

MatX local_tangent(const ConstitutiveLaw& law, const ElementGeometry& geom, const VecX& u,
                   const VecX& s, const MaterialState* state, const VecX* u_old, AlphaNorm norm)
{
    const ElementOps ops = build_element_ops(geom);
    const Real alpha = alpha_param(law, s, geom, norm, state);
    return local_eval(law, ops, u, alpha, true, state, u_old).tangent;
}

} // namespace vem
