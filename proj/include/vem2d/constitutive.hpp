#pragma once

#include "vem2d/types.hpp"

#include <functional>
#include <optional>

namespace vem {

// Per-element history for inelastic laws. Symmetric tensors are stored as
// (xx, yy, zz, xy) with tensor (not engineering) shear components; the zz
// entries are carried because J2 flow is three-dimensional under plane strain.
struct MaterialState {
    Vec4 plastic_strain = Vec4::Zero();
    Vec4 back_stress = Vec4::Zero();
    Real gamma = 0.0; // accumulated plastic multiplier, non-decreasing
};

struct ConstitutiveResponse {
    Mat2 stress = Mat2::Zero();  // sigma (or P for finite strain)
    Mat4 tangent = Mat4::Zero(); // d stress / d grad_u, rows 2i+j, cols 2k+l
    std::optional<MaterialState> new_state;
    std::optional<Real> stress_zz; // plane-strain out-of-plane stress
};

// Black-box constitutive algorithm. Elastic laws implement evaluate();
// history-dependent laws also implement evaluate_step(), which consumes the
// previous converged gradient and history and returns the updated state.
class ConstitutiveLaw {
public:
    virtual ~ConstitutiveLaw() = default;

    virtual ConstitutiveResponse evaluate(const Mat2& grad_u) const = 0;

    virtual ConstitutiveResponse evaluate_step(const Mat2& /*grad_u_old*/,
                                               const MaterialState& /*state*/,
                                               const Mat2& grad_u_new) const
    {
        return evaluate(grad_u_new);
    }

    virtual bool uses_history() const { return false; }
    virtual bool symmetric_tangent() const { return true; }
};

// sigma = lambda tr(eps) I + 2 mu eps, eps = sym(grad_u).
class LinearElastic final : public ConstitutiveLaw {
public:
    LinearElastic(Real lambda, Real mu);
    ConstitutiveResponse evaluate(const Mat2& grad_u) const override;
    Real lambda() const { return lambda_; }
    Real mu() const { return mu_; }

private:
    Real lambda_, mu_;
};

// Hencky-von Mises model with Carreau-type Lame functions of
// rho = ||dev(eps)||:
//   mu(rho)     = (mu_a + mu_b * g(rho)) * scale
//   lambda(rho) = (lambda_a + lambda_b * g(rho)) * scale
// with g(rho) = (1 + rho^2)^(-1/2). The defaults realize
// mu = 3/4 (1 + g) 1e4 MPa and lambda = 3/4 (1 - 2 mu / 1e4) 1e4 MPa.
struct HenckyParams {
    Real mu_a = 0.75;
    Real mu_b = 0.75;
    Real lambda_a = -0.375;
    Real lambda_b = -1.125;
    Real scale = 1.0e4;
};

class HenckyVonMises final : public ConstitutiveLaw {
public:
    explicit HenckyVonMises(HenckyParams params = {});
    ConstitutiveResponse evaluate(const Mat2& grad_u) const override;
    // the rho-chain term breaks major symmetry unless lambda is constant
    bool symmetric_tangent() const override { return false; }

private:
    HenckyParams p_;
};

// Benchmark model sigma = mu_hat(eps) eps with
// mu_hat = 3 (1 + ||eps||^2) 1e4 MPa, ||eps||^2 = sum eps_ij^2.
class BenchmarkLaw final : public ConstitutiveLaw {
public:
    ConstitutiveResponse evaluate(const Mat2& grad_u) const override;
};

enum class NeoHookeanVariant {
    log_j,     // P = mu (F - F^-T) + lambda ln(J) F^-T, stress-free at F = I
    as_printed // P = mu (F + F^-T) + lambda (J-1) J F^-T
};

class NeoHookean final : public ConstitutiveLaw {
public:
    NeoHookean(Real lambda, Real mu, NeoHookeanVariant variant = NeoHookeanVariant::log_j);
    ConstitutiveResponse evaluate(const Mat2& grad_u) const override;
    bool symmetric_tangent() const override { return false; }

private:
    Real lambda_, mu_;
    NeoHookeanVariant variant_;
};

struct J2Params {
    Real E = 70.0;
    Real nu = 0.2;
    Real sigma_y0 = 0.8;
    Real H_iso = 10.0;
    Real H_kin = 10.0;

    Real mu() const { return E / (2.0 * (1.0 + nu)); }
    Real lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
};

// Radial return map for J2 plasticity with linear isotropic and kinematic
// hardening, plane-strain kinematics. The update depends on (state,
// grad_u_new) only; grad_u_old is accepted for interface fidelity with the
// incremental scheme. Returns the algorithmically consistent tangent.
class J2Plasticity final : public ConstitutiveLaw {
public:
    explicit J2Plasticity(J2Params params);
    ConstitutiveResponse evaluate(const Mat2& grad_u) const override;
    ConstitutiveResponse evaluate_step(const Mat2& grad_u_old, const MaterialState& state,
                                       const Mat2& grad_u_new) const override;
    bool uses_history() const override { return true; }
    const J2Params& params() const { return p_; }

private:
    J2Params p_;
};

// Central-difference tangent with per-component step h = step (1 + |grad_u|_inf).
Mat4 tangent_fd_oracle(const std::function<Mat2(const Mat2&)>& stress_of_grad, const Mat2& grad_u,
                       Real step = 1e-6);
Mat4 tangent_fd_oracle(const ConstitutiveLaw& law, const Mat2& grad_u, Real step = 1e-6);

} // namespace vem
