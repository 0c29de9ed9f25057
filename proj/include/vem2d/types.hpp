#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstdint>

namespace vem {

using Real = double;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<Real>;

// A fourth-order tensor T[i][j][k][l] on 2x2 matrices is stored as a 4x4
// matrix with row 2i+j and column 2k+l, so that vec4(T : M) = T * vec4(M).
inline Real& t4(Mat4& T, int i, int j, int k, int l) { return T(2 * i + j, 2 * k + l); }
inline Real t4(const Mat4& T, int i, int j, int k, int l) { return T(2 * i + j, 2 * k + l); }

inline Vec4 vec4(const Mat2& m)
{
    return Vec4(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

inline Mat2 mat2(const Vec4& v)
{
    Mat2 m;
    m << v(0), v(1), v(2), v(3);
    return m;
}

template <typename Derived>
Mat2 sym(const Eigen::MatrixBase<Derived>& m)
{
    return 0.5 * (m + m.transpose());
}

// Deviatoric part with the 2D convention tr-part = (tr/2) I.
template <typename Derived>
Mat2 dev2(const Eigen::MatrixBase<Derived>& m)
{
    return m - 0.5 * m.trace() * Mat2::Identity();
}

// Rotate a vector by -90 degrees; maps a CCW edge tangent to the outward
// normal direction scaled by the edge length.
inline Vec2 rot90cw(const Vec2& v) { return Vec2(v.y(), -v.x()); }

inline Real cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Projector vec4(grad_u) -> vec4(sym(grad_u)).
inline Mat4 sym_projector()
{
    Mat4 p = Mat4::Zero();
    p(0, 0) = 1.0;
    p(3, 3) = 1.0;
    p(1, 1) = p(1, 2) = p(2, 1) = p(2, 2) = 0.5;
    return p;
}

// vec4(I) vec4(I)^T, the volumetric dyad I (x) I.
inline Mat4 identity_dyad()
{
    const Vec4 vi = vec4(Mat2::Identity());
    return vi * vi.transpose();
}

} // namespace vem
