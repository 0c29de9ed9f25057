#include "vem2d/constitutive.hpp"

#include "vem2d/errors.hpp"

#include <cmath>

namespace vem {

namespace {

bool finite(const Mat2& m) { return m.allFinite(); }

// 4-vector symmetric-tensor helpers, components (xx, yy, zz, xy).
Real trace3(const Vec4& t) { return t(0) + t(1) + t(2); }

Vec4 dev3(const Vec4& t)
{
    const Real m = trace3(t) / 3.0;
    return Vec4(t(0) - m, t(1) - m, t(2) - m, t(3));
}

Real norm3(const Vec4& t)
{
    return std::sqrt(t(0) * t(0) + t(1) * t(1) + t(2) * t(2) + 2.0 * t(3) * t(3));
}

} // namespace

LinearElastic::LinearElastic(Real lambda, Real mu) : lambda_(lambda), mu_(mu)
{
    if (!(mu > 0.0) || !(lambda + mu > 0.0))
        throw InvalidParameterError("linear elastic law requires mu > 0 and lambda + mu > 0");
}

ConstitutiveResponse LinearElastic::evaluate(const Mat2& grad_u) const
{
    if (!finite(grad_u))
        throw InvalidInputError("linear elastic law: non-finite gradient");
    const Mat2 eps = sym(grad_u);
    ConstitutiveResponse r;
    r.stress = lambda_ * eps.trace() * Mat2::Identity() + 2.0 * mu_ * eps;
    r.tangent = lambda_ * identity_dyad() + 2.0 * mu_ * sym_projector();
    return r;
}

HenckyVonMises::HenckyVonMises(HenckyParams params) : p_(params) {}

ConstitutiveResponse HenckyVonMises::evaluate(const Mat2& grad_u) const
{
    if (!finite(grad_u))
        throw InvalidInputError("Hencky-von Mises law: non-finite gradient");
    const Mat2 eps = sym(grad_u);
    const Mat2 dev = dev2(eps);
    const Real rho = dev.norm();

    const Real g = 1.0 / std::sqrt(1.0 + rho * rho);
    const Real dg = -rho * g * g * g;
    const Real mu = (p_.mu_a + p_.mu_b * g) * p_.scale;
    const Real lambda = (p_.lambda_a + p_.lambda_b * g) * p_.scale;
    const Real dmu = p_.mu_b * dg * p_.scale;
    const Real dlambda = p_.lambda_b * dg * p_.scale;

    ConstitutiveResponse r;
    r.stress = lambda * eps.trace() * Mat2::Identity() + 2.0 * mu * eps;

    Mat4 deps = lambda * identity_dyad() + 2.0 * mu * Mat4::Identity();
    if (rho > 0.0) {
        // chain term through rho = |dev eps|; d rho / d eps = dev(eps)/rho
        const Vec4 direction = vec4(dev) / rho;
        const Vec4 head = vec4(Mat2(dlambda * eps.trace() * Mat2::Identity() + 2.0 * dmu * eps));
        deps += head * direction.transpose();
    }
    r.tangent = deps * sym_projector();
    return r;
}

ConstitutiveResponse BenchmarkLaw::evaluate(const Mat2& grad_u) const
{
    if (!finite(grad_u))
        throw InvalidInputError("benchmark law: non-finite gradient");
    const Mat2 eps = sym(grad_u);
    const Real mu_hat = 3.0e4 * (1.0 + eps.squaredNorm());
    ConstitutiveResponse r;
    r.stress = mu_hat * eps;
    const Vec4 ve = vec4(eps);
    r.tangent = (mu_hat * Mat4::Identity() + 6.0e4 * ve * ve.transpose()) * sym_projector();
    return r;
}

NeoHookean::NeoHookean(Real lambda, Real mu, NeoHookeanVariant variant)
    : lambda_(lambda), mu_(mu), variant_(variant)
{
    if (!(mu > 0.0))
        throw InvalidParameterError("neo-Hookean law requires mu > 0");
}

ConstitutiveResponse NeoHookean::evaluate(const Mat2& grad_u) const
{
    if (!finite(grad_u))
        throw InvalidInputError("neo-Hookean law: non-finite gradient");
    const Mat2 F = Mat2::Identity() + grad_u;
    const Real J = F.determinant();
    if (!(J > 0.0))
        throw InvertedElementError("neo-Hookean law: det(I + grad_u) <= 0");
    Mat2 Fit = F.inverse().transpose();

    ConstitutiveResponse r;
    Real c_ft;  // coefficient of Fit_il Fit_kj in the tangent
    Real c_dyad; // coefficient of Fit_ij Fit_kl
    if (variant_ == NeoHookeanVariant::log_j) {
        const Real lnJ = std::log(J);
        r.stress = mu_ * (F - Fit) + lambda_ * lnJ * Fit;
        c_ft = mu_ - lambda_ * lnJ;
        c_dyad = lambda_;
    } else {
        const Real w = lambda_ * (J - 1.0) * J;
        r.stress = mu_ * (F + Fit) + w * Fit;
        c_ft = -(mu_ + w);
        c_dyad = lambda_ * (2.0 * J - 1.0) * J;
    }

    Mat4 A = Mat4::Identity() * mu_;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    t4(A, i, j, k, l) += c_ft * Fit(i, l) * Fit(k, j) + c_dyad * Fit(i, j) * Fit(k, l);
    r.tangent = A;
    return r;
}

J2Plasticity::J2Plasticity(J2Params params) : p_(params)
{
    if (!(p_.E > 0.0) || !(p_.nu > -1.0 && p_.nu < 0.5) || !(p_.sigma_y0 > 0.0) ||
        !(p_.H_iso >= 0.0) || !(p_.H_kin >= 0.0))
        throw InvalidParameterError("J2 plasticity: invalid material parameters");
}

ConstitutiveResponse J2Plasticity::evaluate(const Mat2& grad_u) const
{
    return evaluate_step(Mat2::Zero(), MaterialState{}, grad_u);
}

ConstitutiveResponse J2Plasticity::evaluate_step(const Mat2& grad_u_old, const MaterialState& state,
                                                 const Mat2& grad_u_new) const
{
    if (!finite(grad_u_old) || !finite(grad_u_new) || !state.plastic_strain.allFinite() ||
        !state.back_stress.allFinite() || !std::isfinite(state.gamma))
        throw InvalidInputError("J2 return map: non-finite input");

    const Real mu = p_.mu();
    const Real lambda = p_.lambda();
    const Real kappa = lambda + 2.0 * mu / 3.0;

    // plane strain: eps_zz = eps_xz = eps_yz = 0
    const Mat2 eps2 = sym(grad_u_new);
    const Vec4 eps(eps2(0, 0), eps2(1, 1), 0.0, eps2(0, 1));

    const Vec4 eps_el = eps - state.plastic_strain;
    const Real tr_el = trace3(eps_el);
    Vec4 sigma_tr = 2.0 * mu * eps_el;
    sigma_tr(0) += lambda * tr_el;
    sigma_tr(1) += lambda * tr_el;
    sigma_tr(2) += lambda * tr_el;

    const Vec4 xi = dev3(sigma_tr) - state.back_stress;
    const Real xi_norm = norm3(xi);
    const Real hardening = std::sqrt(2.0 / 3.0) *
                           (p_.sigma_y0 + p_.H_iso * std::sqrt(2.0 / 3.0) * state.gamma);
    const Real f_trial = xi_norm - hardening;

    const Mat4 elastic_tangent =
        (lambda * identity_dyad() + 2.0 * mu * Mat4::Identity()) * sym_projector();

    ConstitutiveResponse r;
    if (f_trial <= 0.0) {
        r.stress << sigma_tr(0), sigma_tr(3), sigma_tr(3), sigma_tr(1);
        r.stress_zz = sigma_tr(2);
        r.tangent = elastic_tangent;
        r.new_state = state; // bit-for-bit unchanged
        return r;
    }

    const Real dgamma = f_trial / (2.0 * mu + (2.0 / 3.0) * (p_.H_iso + p_.H_kin));
    const Vec4 n = xi / xi_norm;

    const Vec4 sigma = sigma_tr - 2.0 * mu * dgamma * n;
    MaterialState next = state;
    next.plastic_strain += dgamma * n;
    next.back_stress += (2.0 / 3.0) * p_.H_kin * dgamma * n;
    next.gamma += dgamma;

    r.stress << sigma(0), sigma(3), sigma(3), sigma(1);
    r.stress_zz = sigma(2);
    r.new_state = next;

    // consistent tangent (Simo & Hughes, Box 3.2), restricted in-plane
    const Real theta = 1.0 - 2.0 * mu * dgamma / xi_norm;
    const Real theta_bar = 1.0 / (1.0 + (p_.H_iso + p_.H_kin) / (3.0 * mu)) - (1.0 - theta);
    Mat2 n2;
    n2 << n(0), n(3), n(3), n(1);
    const Vec4 vn = vec4(n2);
    Mat4 dtan = kappa * identity_dyad() +
                2.0 * mu * theta * (Mat4::Identity() - identity_dyad() / 3.0) -
                2.0 * mu * theta_bar * vn * vn.transpose();
    r.tangent = dtan * sym_projector();
    return r;
}

Mat4 tangent_fd_oracle(const std::function<Mat2(const Mat2&)>& stress_of_grad, const Mat2& grad_u,
                       Real step)
{
    const Real h = step * (1.0 + grad_u.cwiseAbs().maxCoeff());
    Mat4 T;
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            Mat2 gp = grad_u;
            Mat2 gm = grad_u;
            gp(k, l) += h;
            gm(k, l) -= h;
            const Mat2 dsigma = (stress_of_grad(gp) - stress_of_grad(gm)) / (2.0 * h);
            T.col(2 * k + l) = vec4(dsigma);
        }
    }
    return T;
}

Mat4 tangent_fd_oracle(const ConstitutiveLaw& law, const Mat2& grad_u, Real step)
{
    return tangent_fd_oracle([&law](const Mat2& g) { return law.evaluate(g).stress; }, grad_u,
                             step);
}

} // namespace vem
