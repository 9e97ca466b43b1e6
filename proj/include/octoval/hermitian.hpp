#pragma once

#include "octoval/octonion.hpp"

namespace octoval {

/// Column of two octonions, identified with R^16 by concatenating the
/// coefficient vectors of q1 and q2.
struct OctoVec2 {
    Octonion q1, q2;

    OctoVec2() = default;
    OctoVec2(const Octonion& a, const Octonion& b) : q1(a), q2(b) {}

    Vec16 coords() const {
        Vec16 v;
        v.head<8>() = q1.coeffs();
        v.tail<8>() = q2.coeffs();
        return v;
    }
    static OctoVec2 from_coords(const Vec16& v) {
        return OctoVec2(Octonion::from_coeffs(v.head<8>()), Octonion::from_coeffs(v.tail<8>()));
    }
};

inline double norm_sq(const OctoVec2& xi) { return norm_sq(xi.q1) + norm_sq(xi.q2); }
inline double norm(const OctoVec2& xi) { return std::sqrt(norm_sq(xi)); }

/// Column scaled on the right by an octonion: (q1*x, q2*x).
inline OctoVec2 scale_right(const OctoVec2& xi, const Octonion& x) {
    return OctoVec2(mul(xi.q1, x), mul(xi.q2, x));
}

inline OctoVec2 operator*(const OctoVec2& xi, double s) { return OctoVec2(xi.q1 * s, xi.q2 * s); }
inline OctoVec2 operator+(const OctoVec2& a, const OctoVec2& b) {
    return OctoVec2(a.q1 + b.q1, a.q2 + b.q2);
}

/// Octonionic hermitian 2x2 matrix [[a, q], [conj(q), b]].
struct HMatrix2 {
    double a = 0.0;
    double b = 0.0;
    Octonion q;

    HMatrix2() = default;
    HMatrix2(double a_, double b_, const Octonion& q_) : a(a_), b(b_), q(q_) {}

    static HMatrix2 identity() { return HMatrix2(1.0, 1.0, Octonion()); }
    static HMatrix2 diag(double a_, double b_) { return HMatrix2(a_, b_, Octonion()); }

    HMatrix2& operator+=(const HMatrix2& o) {
        a += o.a;
        b += o.b;
        q += o.q;
        return *this;
    }
    HMatrix2& operator-=(const HMatrix2& o) {
        a -= o.a;
        b -= o.b;
        q -= o.q;
        return *this;
    }
    HMatrix2& operator*=(double s) {
        a *= s;
        b *= s;
        q *= s;
        return *this;
    }

    /// Coordinates in the fixed basis {diag(1,0), diag(0,1), offdiag(e_i)}.
    Vec10 coords() const {
        Vec10 v;
        v[0] = a;
        v[1] = b;
        for (int i = 0; i < 8; ++i) v[2 + i] = q[i];
        return v;
    }
    static HMatrix2 from_coords(const Vec10& v) {
        HMatrix2 m;
        m.a = v[0];
        m.b = v[1];
        for (int i = 0; i < 8; ++i) m.q[i] = v[2 + i];
        return m;
    }
};

inline HMatrix2 operator+(HMatrix2 x, const HMatrix2& y) { return x += y; }
inline HMatrix2 operator-(HMatrix2 x, const HMatrix2& y) { return x -= y; }
inline HMatrix2 operator*(HMatrix2 x, double s) { return x *= s; }
inline HMatrix2 operator*(double s, HMatrix2 x) { return x *= s; }

/// Real symmetric 16x16 matrix (quadratic forms on R^16).
using RealSym16 = Mat16;

/// Re(xi^* A xi); the bracketing inside is immaterial.
double quad_form(const HMatrix2& A, const OctoVec2& xi);

/// ab - |q|^2.
inline double det(const HMatrix2& A) { return A.a * A.b - norm_sq(A.q); }

/// Symmetric bilinear polarization of det: mixed_det(A, A) = det(A).
double mixed_det(const HMatrix2& A, const HMatrix2& B);

/// Entry norm a + b + 2|q| used for positivity tolerances; for A >= 0 it is
/// bounded by 4 * mixed_det(A, I).
inline double entry_norm(const HMatrix2& A) { return A.a + A.b + 2.0 * norm(A.q); }

/// Sylvester-type criterion. Strict: a > 0 and det > 0. Non-strict accepts
/// a rounding margin so boundary matrices arising as limits pass.
bool is_positive(const HMatrix2& A, bool strict);

/// Max |entry| difference between two hermitian matrices.
inline double max_abs_diff(const HMatrix2& A, const HMatrix2& B) {
    double m = std::max(std::abs(A.a - B.a), std::abs(A.b - B.b));
    for (int i = 0; i < 8; ++i) m = std::max(m, std::abs(A.q[i] - B.q[i]));
    return m;
}

/// Symmetric matrix of the form xi -> quad_form(A, xi) in coefficient
/// coordinates: [[a*I, L_q], [L_q^T, b*I]].
RealSym16 embed_j(const HMatrix2& A);

/// Left inverse of embed_j: constant octonionic Hessian of the quadratic
/// form of B, computed in closed form and scaled by 1/16. Throws
/// std::domain_error if B is not symmetric.
HMatrix2 project_theta(const RealSym16& B);

/// xi * eta^* + eta * xi^* (hermitian by construction).
HMatrix2 herm_outer(const OctoVec2& xi, const OctoVec2& eta);

/// Hermitian matrix with a, b uniform on [-1,1] and random q.
HMatrix2 random_hmatrix(Rng& rng);

/// Sum of three random rank-one columns xi xi^*; strictly positive definite
/// for generic draws.
HMatrix2 random_positive_hmatrix(Rng& rng);

inline OctoVec2 random_octovec(Rng& rng) {
    return OctoVec2(random_octonion(rng), random_octonion(rng));
}

} // namespace octoval
