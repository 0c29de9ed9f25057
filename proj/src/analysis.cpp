#include "vem2d/analysis.hpp"

#include "vem2d/errors.hpp"

#include <cmath>
#include <sstream>

namespace vem {

Vec2 manufactured_body_force(const ManufacturedCase& mc, const Vec2& x, Real step)
{
    if (mc.body_force_closed)
        return mc.body_force_closed(x);
    const Real h = step * (1.0 + x.cwiseAbs().maxCoeff());
    const auto stress_at = [&](const Vec2& y) { return mc.law->evaluate(mc.grad_u(y)).stress; };
    Vec2 f = Vec2::Zero();
    for (int j = 0; j < 2; ++j) {
        Vec2 xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const Mat2 d = (stress_at(xp) - stress_at(xm)) / (2.0 * h);
        f(0) -= d(0, j);
        f(1) -= d(1, j);
    }
    return f;
}

BodyForce manufactured_body_force_field(const ManufacturedCase& mc, Real step)
{
    return [mc, step](const Vec2& x) { return manufactured_body_force(mc, x, step); };
}

Real error_0_inf(const PolyMesh& mesh, const VecX& u_h, const ExactDisplacement& exact)
{
    Real err = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec2 e = u_h.segment<2>(2 * v) - exact(mesh.vertices[v]);
        err = std::max(err, e.cwiseAbs().maxCoeff());
    }
    return err;
}

Real error_1_2(const PolyMesh& mesh, const VecX& u_h, const ExactDisplacement& exact,
               const ExactGradient& exact_grad)
{
    // 3-point Gauss on [0,1]
    static const Real gp[3] = {0.5 * (1.0 - std::sqrt(0.6)), 0.5, 0.5 * (1.0 + std::sqrt(0.6))};
    static const Real gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

    Real total = 0.0;
    for (const auto& [a, b] : collect_edges(mesh)) {
        const Vec2 pa = mesh.vertices[a];
        const Vec2 pb = mesh.vertices[b];
        const Real h_e = (pb - pa).norm();
        const Vec2 t_e = (pb - pa) / h_e; // lower to higher vertex index
        const Vec2 dh = (u_h.segment<2>(2 * b) - u_h.segment<2>(2 * a)) / h_e;
        Real edge_int = 0.0;
        for (int q = 0; q < 3; ++q) {
            const Vec2 x = pa + gp[q] * (pb - pa);
            const Vec2 diff = dh - exact_grad(x) * t_e;
            edge_int += gw[q] * diff.squaredNorm();
        }
        total += h_e * (h_e * edge_int); // ||.||^2_{0,e} carries the edge length
    }
    return std::sqrt(total);
}

Real error_inf_relative(const PolyMesh& mesh, const VecX& u_h, const ExactDisplacement& exact)
{
    Real num = 0.0;
    Real den = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec2 ue = exact(mesh.vertices[v]);
        const Vec2 e = u_h.segment<2>(2 * v) - ue;
        num = std::max(num, e.cwiseAbs().maxCoeff());
        den = std::max(den, ue.cwiseAbs().maxCoeff());
    }
    if (den == 0.0)
        throw InvalidInputError("error_inf_relative: exact solution vanishes at all vertices");
    return num / den;
}

std::vector<Real> convergence_rate(const std::vector<std::pair<int, Real>>& rows)
{
    std::vector<Real> rates;
    for (size_t k = 1; k < rows.size(); ++k) {
        const auto& [n0, e0] = rows[k - 1];
        const auto& [n1, e1] = rows[k];
        if (n1 <= n0)
            throw InvalidInputError("convergence_rate: vertex counts must increase");
        if (!(e0 > 0.0) || !(e1 > 0.0))
            throw UndefinedRateError("convergence_rate: errors must be positive");
        rates.push_back(-2.0 * std::log(e0 / e1) /
                        std::log(static_cast<Real>(n0) / static_cast<Real>(n1)));
    }
    return rates;
}

void fill_rates(std::vector<ConvergenceRow>& rows)
{
    for (size_t k = 1; k < rows.size(); ++k) {
        const Real ln = std::log(static_cast<Real>(rows[k - 1].N_h) / rows[k].N_h);
        rows[k].R_0inf = -2.0 * std::log(rows[k - 1].E_0inf / rows[k].E_0inf) / ln;
        rows[k].R_12 = -2.0 * std::log(rows[k - 1].E_12 / rows[k].E_12) / ln;
    }
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows)
{
    std::ostringstream out;
    out.precision(12);
    out << std::scientific;
    out << "N_h,E_0inf,R_0inf,E_12,R_12\n";
    for (const auto& r : rows) {
        out << r.N_h << "," << r.E_0inf << ",";
        if (r.R_0inf)
            out << *r.R_0inf;
        out << "," << r.E_12 << ",";
        if (r.R_12)
            out << *r.R_12;
        out << "\n";
    }
    return out.str();
}

} // namespace vem
