#include "octoval/hermitian.hpp"

#include <stdexcept>

namespace octoval {

double quad_form(const HMatrix2& A, const OctoVec2& xi) {
    // Re(xi^* A xi) = a|x|^2 + b|y|^2 + 2 Re(q y conj(x)).
    return A.a * norm_sq(xi.q1) + A.b * norm_sq(xi.q2) +
           2.0 * re(mul(mul(A.q, xi.q2), conj(xi.q1)));
}

double mixed_det(const HMatrix2& A, const HMatrix2& B) {
    // (1/2)(a11 b22 + a22 b11 - 2 Re(a12 b21)), with b21 = conj(B.q).
    return 0.5 * (A.a * B.b + A.b * B.a) - inner(A.q, B.q);
}

bool is_positive(const HMatrix2& A, bool strict) {
    if (strict) return A.a > 0.0 && det(A) > 0.0;
    const double nrm = entry_norm(A);
    const double tol = 1e-10 * (1.0 + nrm * nrm);
    return A.a >= -tol && A.b >= -tol && det(A) >= -tol;
}

RealSym16 embed_j(const HMatrix2& A) {
    RealSym16 m = RealSym16::Zero();
    m.topLeftCorner<8, 8>() = A.a * Eigen::Matrix<double, 8, 8>::Identity();
    m.bottomRightCorner<8, 8>() = A.b * Eigen::Matrix<double, 8, 8>::Identity();
    const Eigen::Matrix<double, 8, 8> lq = left_mult_matrix(A.q);
    m.topRightCorner<8, 8>() = lq;
    m.bottomLeftCorner<8, 8>() = lq.transpose();
    return m;
}

HMatrix2 project_theta(const RealSym16& B) {
    const double scale = 1.0 + B.cwiseAbs().maxCoeff();
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::domain_error("project_theta: input matrix is not symmetric");

    // Constant octonionic Hessian of z -> z^T B z. Within one octonionic
    // coordinate the off-diagonal unit products cancel in pairs
    // (e_l conj(e_m) + e_m conj(e_l) = 0 for l != m), so the diagonal
    // entries reduce to twice the block traces.
    HMatrix2 h;
    h.a = 2.0 * B.topLeftCorner<8, 8>().trace();
    h.b = 2.0 * B.bottomRightCorner<8, 8>().trace();
    Octonion q12;
    for (int l = 0; l < 8; ++l) {
        for (int m = 0; m < 8; ++m) {
            const double coef = 2.0 * B(l, 8 + m);
            if (coef == 0.0) continue;
            q12 += coef * mul(Octonion::unit(l), conj(Octonion::unit(m)));
        }
    }
    h.q = q12;
    return h * (1.0 / 16.0);
}

HMatrix2 herm_outer(const OctoVec2& xi, const OctoVec2& eta) {
    HMatrix2 m;
    m.a = 2.0 * inner(xi.q1, eta.q1);
    m.b = 2.0 * inner(xi.q2, eta.q2);
    m.q = mul(xi.q1, conj(eta.q2)) + mul(eta.q1, conj(xi.q2));
    return m;
}

HMatrix2 random_hmatrix(Rng& rng) {
    HMatrix2 m;
    m.a = rng.uniform(-1.0, 1.0);
    m.b = rng.uniform(-1.0, 1.0);
    m.q = random_octonion(rng);
    return m;
}

HMatrix2 random_positive_hmatrix(Rng& rng) {
    HMatrix2 m;
    for (int k = 0; k < 3; ++k) {
        const OctoVec2 xi = random_octovec(rng);
        m += herm_outer(xi, xi) * 0.5;
    }
    return m;
}

} // namespace octoval
