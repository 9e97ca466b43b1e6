#include "octoval/spin.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace octoval {
namespace {

struct OctoMat2 {
    Octonion a11, a12, a21, a22;
};

OctoMat2 mul(const OctoMat2& x, const OctoMat2& y) {
    return OctoMat2{
        mul(x.a11, y.a11) + mul(x.a12, y.a21),
        mul(x.a11, y.a12) + mul(x.a12, y.a22),
        mul(x.a21, y.a11) + mul(x.a22, y.a21),
        mul(x.a21, y.a12) + mul(x.a22, y.a22),
    };
}

OctoMat2 adjoint(const TracelessOctoMatrix& m) {
    return OctoMat2{conj(m.m11), conj(m.m21), conj(m.m12), conj(m.m22)};
}

OctoMat2 full(const TracelessOctoMatrix& m) { return OctoMat2{m.m11, m.m12, m.m21, m.m22}; }

OctoMat2 full(const HMatrix2& x) {
    return OctoMat2{Octonion(x.a), x.q, conj(x.q), Octonion(x.b)};
}

/// -M^* X - X M for hermitian X; the result is hermitian again.
HMatrix2 algebra_action(const TracelessOctoMatrix& m, const HMatrix2& x) {
    const OctoMat2 xm2 = full(x);
    const OctoMat2 left = mul(adjoint(m), xm2);
    const OctoMat2 right = mul(xm2, full(m));
    const Octonion r11 = -(left.a11 + right.a11);
    const Octonion r22 = -(left.a22 + right.a22);
    const Octonion r12 = -(left.a12 + right.a12);
    HMatrix2 out;
    out.a = re(r11);
    out.b = re(r22);
    out.q = r12;
    return out;
}

double frob_inner(const Mat16& a, const Mat16& b) { return (a.array() * b.array()).sum(); }

} // namespace

LieElement operator16(const TracelessOctoMatrix& m) {
    if (norm(m.m11 + m.m22) > 1e-14)
        throw std::domain_error("operator16: matrix has nonzero trace");

    LieElement el;
    el.rep16.topLeftCorner<8, 8>() = left_mult_matrix(m.m11);
    el.rep16.topRightCorner<8, 8>() = left_mult_matrix(m.m12);
    el.rep16.bottomLeftCorner<8, 8>() = left_mult_matrix(m.m21);
    el.rep16.bottomRightCorner<8, 8>() = left_mult_matrix(m.m22);

    for (int k = 0; k < 10; ++k) {
        Vec10 basis_vec = Vec10::Zero();
        basis_vec[k] = 1.0;
        el.repH.col(k) = algebra_action(m, HMatrix2::from_coords(basis_vec)).coords();
    }
    return el;
}

std::vector<LieElement> lie_closure(const std::vector<LieElement>& generators) {
    std::vector<LieElement> basis;
    double max_norm = 0.0;

    auto try_add = [&](LieElement cand) {
        const double cand_norm = std::sqrt(frob_inner(cand.rep16, cand.rep16));
        max_norm = std::max(max_norm, cand_norm);
        // Two modified Gram-Schmidt passes against the current basis.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                const double c = frob_inner(cand.rep16, b.rep16);
                cand.rep16 -= c * b.rep16;
                cand.repH -= c * b.repH;
            }
        }
        const double resid = std::sqrt(frob_inner(cand.rep16, cand.rep16));
        if (resid <= 1e-9 * std::max(max_norm, 1e-300)) return false;
        cand.rep16 /= resid;
        cand.repH /= resid;
        basis.push_back(std::move(cand));
        return true;
    };

    for (const auto& g : generators) try_add(g);

    for (int round = 0; round < 10; ++round) {
        bool grew = false;
        const std::size_t n = basis.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                LieElement br;
                br.rep16 = basis[i].rep16 * basis[j].rep16 - basis[j].rep16 * basis[i].rep16;
                br.repH = basis[i].repH * basis[j].repH - basis[j].repH * basis[i].repH;
                grew |= try_add(std::move(br));
            }
        }
        if (!grew) return basis;
    }
    throw NumericalError("lie_closure: span did not stabilize within 10 rounds");
}

std::vector<LieElement> compact_basis(const std::vector<LieElement>& full) {
    const int n = int(full.size());
    if (n == 0) throw NumericalError("compact_basis: empty closure");

    // Kernel of the symmetrization map, i.e. combinations whose rep16 is
    // antisymmetric.
    Eigen::MatrixXd sym_map(136, n);
    for (int k = 0; k < n; ++k) {
        const Mat16 s = 0.5 * (full[std::size_t(k)].rep16 + full[std::size_t(k)].rep16.transpose());
        int row = 0;
        for (int i = 0; i < 16; ++i)
            for (int j = i; j < 16; ++j) sym_map(row++, k) = s(i, j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym_map, Eigen::ComputeFullV);
    const double smax = svd.singularValues()[0];
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-9 * smax) ++rank;
    const int dim = n - rank;
    if (dim != 36)
        throw NumericalError("compact_basis: expected dimension 36, got " + std::to_string(dim));

    std::vector<LieElement> out;
    out.reserve(36);
    for (int k = rank; k < n; ++k) {
        const Eigen::VectorXd c = svd.matrixV().col(k);
        LieElement el;
        for (int i = 0; i < n; ++i) {
            el.rep16 += c[i] * full[std::size_t(i)].rep16;
            el.repH += c[i] * full[std::size_t(i)].repH;
        }
        // The closure basis is Frobenius-orthonormal, so orthonormal kernel
        // coefficients give Frobenius-orthonormal elements.
        out.push_back(std::move(el));
    }
    return out;
}

namespace {

template <typename Mat>
Mat expm_impl(const Mat& a) {
    const double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (nrm > 0.25) squarings = int(std::ceil(std::log2(nrm / 0.25)));
    const Mat b = a / std::pow(2.0, squarings);

    Mat sum = Mat::Identity();
    Mat term = Mat::Identity();
    for (int k = 1; k <= 40; ++k) {
        term = (term * b / double(k)).eval();
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * sum.cwiseAbs().maxCoeff()) break;
    }
    for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
    return sum;
}

} // namespace

Mat16 expm(const Mat16& a) { return expm_impl(a); }
Mat10 expm(const Mat10& a) { return expm_impl(a); }

GroupElement exponentiate(const std::vector<LieElement>& basis, const std::vector<double>& coeffs) {
    Mat16 a16 = Mat16::Zero();
    Mat10 ah = Mat10::Zero();
    for (std::size_t k = 0; k < basis.size() && k < coeffs.size(); ++k) {
        a16 += coeffs[k] * basis[k].rep16;
        ah += coeffs[k] * basis[k].repH;
    }
    return GroupElement{expm(a16), expm(ah)};
}

SpinContext::SpinContext() {
    std::vector<LieElement> gens;
    for (int i = 0; i < 8; ++i) {
        gens.push_back(operator16(TracelessOctoMatrix::e12(Octonion::unit(i))));
        gens.push_back(operator16(TracelessOctoMatrix::e21(Octonion::unit(i))));
        gens.push_back(operator16(TracelessOctoMatrix::diag(Octonion::unit(i))));
    }
    full_ = lie_closure(gens);
    if (full_.size() != 45)
        throw NumericalError("SpinContext: closure dimension " + std::to_string(full_.size()) +
                             ", expected 45");
    compact_ = compact_basis(full_);
}

const SpinContext& SpinContext::instance() {
    static const SpinContext ctx;
    return ctx;
}

GroupElement SpinContext::sample_spin9(Rng& rng) const {
    std::vector<double> coeffs(compact_.size());
    for (auto& c : coeffs) c = rng.normal() * 0.5;
    return exponentiate(compact_, coeffs);
}

GroupElement SpinContext::sample_sl2(Rng& rng, double scale) const {
    std::vector<double> coeffs(full_.size());
    for (auto& c : coeffs) c = rng.uniform(-scale, scale) / std::sqrt(double(full_.size()));
    return exponentiate(full_, coeffs);
}

double SpinContext::span_residual(const Mat16& m) const {
    Mat16 r = m;
    for (const auto& b : full_) r -= frob_inner(r, b.rep16) * b.rep16;
    return std::sqrt(frob_inner(r, r));
}

HMatrix2 hopf_class(const OctoVec2& xi) {
    const double n = norm(xi);
    if (n == 0.0) throw std::domain_error("hopf_class: zero vector has no Hopf class");
    const OctoVec2 unit = xi * (1.0 / n);
    return herm_outer(unit, unit) * 0.5;
}

} // namespace octoval
