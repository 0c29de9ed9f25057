#pragma once

#include "vem2d/constitutive.hpp"
#include "vem2d/mesh.hpp"
#include "vem2d/solver.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vem {

using ExactDisplacement = std::function<Vec2(const Vec2&)>;
using ExactGradient = std::function<Mat2(const Vec2&)>;

struct ManufacturedCase {
    ExactDisplacement u;
    ExactGradient grad_u;
    std::shared_ptr<const ConstitutiveLaw> law;
    BodyForce body_force_closed; // optional closed form; empty -> FD divergence
};

// f(x) = -div sigma(grad_u(.)) at x, by central differences of
// y -> sigma(grad_u(y)) with step 1e-5 (1 + |x|_inf) unless a closed form
// is supplied.
Vec2 manufactured_body_force(const ManufacturedCase& mc, const Vec2& x, Real step = 1e-5);
BodyForce manufactured_body_force_field(const ManufacturedCase& mc, Real step = 1e-5);

// max over mesh vertices of the l_inf norm of (u_h - u).
Real error_0_inf(const PolyMesh& mesh, const VecX& u_h, const ExactDisplacement& exact);

// Discrete H1-like norm: (sum_e h_e ||d(u_h - u)/dt_e||^2_{0,e})^(1/2); the
// discrete tangential derivative is the edge difference quotient, the exact
// one is integrated with 3-point Gauss.
Real error_1_2(const PolyMesh& mesh, const VecX& u_h, const ExactDisplacement& exact,
               const ExactGradient& exact_grad);

// Relative vertexwise error max |u_i - u_h,i| / max |u_i| over both components.
Real error_inf_relative(const PolyMesh& mesh, const VecX& u_h, const ExactDisplacement& exact);

// R = -2 log(E/E') / log(N_h/N_h') for consecutive rows; output size is one
// less than the input.
std::vector<Real> convergence_rate(const std::vector<std::pair<int, Real>>& rows);

struct ConvergenceRow {
    int N_h = 0;
    Real E_0inf = 0.0;
    Real E_12 = 0.0;
    std::optional<Real> R_0inf;
    std::optional<Real> R_12;
};

void fill_rates(std::vector<ConvergenceRow>& rows);

// CSV with header N_h,E_0inf,R_0inf,E_12,R_12; undefined rates are blank.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

} // namespace vem
