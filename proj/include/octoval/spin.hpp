#pragma once

#include "octoval/hermitian.hpp"

#include <vector>

namespace octoval {

/// Octonionic 2x2 matrix with m11 + m22 = 0.
struct TracelessOctoMatrix {
    Octonion m11, m12, m21, m22;

    TracelessOctoMatrix() = default;
    TracelessOctoMatrix(const Octonion& a11, const Octonion& a12, const Octonion& a21,
                        const Octonion& a22)
        : m11(a11), m12(a12), m21(a21), m22(a22) {}

    static TracelessOctoMatrix e12(const Octonion& q) {
        return TracelessOctoMatrix(Octonion(), q, Octonion(), Octonion());
    }
    static TracelessOctoMatrix e21(const Octonion& q) {
        return TracelessOctoMatrix(Octonion(), Octonion(), q, Octonion());
    }
    static TracelessOctoMatrix diag(const Octonion& q) {
        return TracelessOctoMatrix(q, Octonion(), Octonion(), -q);
    }

    OctoVec2 apply(const OctoVec2& xi) const {
        return OctoVec2(mul(m11, xi.q1) + mul(m12, xi.q2), mul(m21, xi.q1) + mul(m22, xi.q2));
    }
};

/// Element of the Lie algebra in both representations: the fundamental one
/// on O^2 = R^16 and the induced one on H2(O) in the fixed 10-basis.
struct LieElement {
    Mat16 rep16 = Mat16::Zero();
    Mat10 repH = Mat10::Zero();
};

/// Group element, both representations exponentiated from one coefficient
/// vector over the algebra basis.
struct GroupElement {
    Mat16 g16 = Mat16::Identity();
    Mat10 gH = Mat10::Identity();
};

/// rep16 = matrix of xi -> M xi in coefficient coordinates; repH = matrix of
/// X -> -M^* X - X M on H2(O). Throws std::domain_error on nonzero trace.
LieElement operator16(const TracelessOctoMatrix& m);

/// Bracket closure with Frobenius re-orthonormalization over rep16; the same
/// linear combinations are applied to repH so the pair stays consistent.
/// Throws NumericalError if the span has not stabilized in 10 rounds.
std::vector<LieElement> lie_closure(const std::vector<LieElement>& generators);

/// Intersection of the closure span with antisymmetric 16x16 matrices.
/// Throws NumericalError if the dimension is not 36.
std::vector<LieElement> compact_basis(const std::vector<LieElement>& full);

/// One-time construction of the 45-dimensional closure and its 36-dimensional
/// compact part from the traceless generator set; immutable afterwards.
class SpinContext {
public:
    static const SpinContext& instance();

    const std::vector<LieElement>& full_basis() const { return full_; }
    const std::vector<LieElement>& compact() const { return compact_; }

    /// Gaussian coefficients over the compact basis; g16 is orthogonal.
    GroupElement sample_spin9(Rng& rng) const;

    /// Small-coefficient sample over the full algebra (non-compact allowed).
    GroupElement sample_sl2(Rng& rng, double scale = 0.5) const;

    /// Residual of a 16x16 matrix against the closure span (Frobenius).
    double span_residual(const Mat16& m) const;

private:
    SpinContext();
    std::vector<LieElement> full_;
    std::vector<LieElement> compact_;
};

/// Matrix exponential by scaling-and-squaring with a Taylor kernel.
Mat16 expm(const Mat16& a);
Mat10 expm(const Mat10& a);

/// Group element from explicit coefficients over a basis.
GroupElement exponentiate(const std::vector<LieElement>& basis, const std::vector<double>& coeffs);

/// Apply the 10x10 representation to a hermitian matrix.
inline HMatrix2 apply_h(const Mat10& gh, const HMatrix2& x) {
    return HMatrix2::from_coords(gh * x.coords());
}

/// Apply a 16x16 matrix to a column of two octonions.
inline OctoVec2 apply16(const Mat16& g, const OctoVec2& xi) {
    return OctoVec2::from_coords(g * xi.coords());
}

/// xi xi^* for the normalized vector; hermitian with trace 1 for unit xi.
/// Throws std::domain_error for xi = 0.
HMatrix2 hopf_class(const OctoVec2& xi);

} // namespace octoval
