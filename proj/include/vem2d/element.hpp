#pragma once

#include "vem2d/constitutive.hpp"
#include "vem2d/mesh.hpp"
#include "vem2d/types.hpp"

#include <optional>

namespace vem {

// Element dof vectors are interleaved vertex displacements
// (u_x(v0), u_y(v0), u_x(v1), ...) in cell loop order.

enum class AlphaNorm { max_abs, frobenius };

// Geometry-only element operators; the projectors, the stabilization matrix
// and the load weights depend on the polygon alone, so they are built once
// per element and reused across Newton iterations and load steps.
struct ElementOps {
    Eigen::Matrix<Real, 4, Eigen::Dynamic> grad_op; // vec4(Pi0 grad v) = grad_op * dofs
    MatX pi_nabla_op;                               // dof values of Pi_nabla v
    MatX stab;                                      // (I - Pi_nabla)^T (I - Pi_nabla)
    VecX load_weights;                              // omega_nu; empty if not star-shaped
    Real area = 0.0;
    Real diameter = 0.0;
    bool star_shaped = false;

    int num_dofs() const { return static_cast<int>(stab.rows()); }
};

ElementOps build_element_ops(const ElementGeometry& geom);

// Integral average of the gradient, computable from boundary dofs.
Mat2 pi0_grad(const ElementGeometry& geom, const VecX& dofs);

// Vertex values of the linear polynomial matching the gradient average and
// the vertex-value average of the argument.
VecX pi_nabla(const ElementGeometry& geom, const VecX& dofs);

MatX stab_matrix(const ElementGeometry& geom);

// omega_nu from the centroid fan, exact for linear integrands; throws
// UnsupportedElementError if the element is not star-shaped w.r.t. the
// vertex centroid.
VecX vertex_load_weights(const ElementGeometry& geom);

// Stabilization scaling: norm of the constitutive tangent at Pi0 grad(s).
Real alpha_param(const ConstitutiveLaw& law, const VecX& s_dofs, const ElementGeometry& geom,
                 AlphaNorm norm = AlphaNorm::max_abs,
                 const MaterialState* state = nullptr);

struct LocalResult {
    VecX force;                          // generalized forces on the element dofs
    MatX tangent;                        // present when requested
    Mat2 stress = Mat2::Zero();          // law output at Pi0 grad(u), for reporting
    std::optional<MaterialState> new_state;
    std::optional<Real> stress_zz;
};

// Residual and consistent tangent of the local form
//   |E| sigma_hat(Pi0 grad u) : Pi0 grad w + alpha (u - Pi u)^T (w - Pi w).
// The constitutive law is invoked exactly once per call. In inelastic mode
// (state != nullptr) the law consumes (Pi0 grad u_old, state, Pi0 grad u).
LocalResult local_eval(const ConstitutiveLaw& law, const ElementOps& ops, const VecX& u,
                       Real alpha, bool want_tangent, const MaterialState* state = nullptr,
                       const VecX* u_old = nullptr);

LocalResult local_residual(const ConstitutiveLaw& law, const ElementGeometry& geom, const VecX& u,
                           const VecX& s, const MaterialState* state = nullptr,
                           const VecX* u_old = nullptr, AlphaNorm norm = AlphaNorm::max_abs);

MatX local_tangent(const ConstitutiveLaw& law, const ElementGeometry& geom, const VecX& u,
                   const VecX& s, const MaterialState* state = nullptr,
                   const VecX* u_old = nullptr, AlphaNorm norm = AlphaNorm::max_abs);

} // namespace vem
