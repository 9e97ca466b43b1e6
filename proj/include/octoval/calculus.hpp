#pragma once

#include "octoval/hermitian.hpp"

#include <functional>
#include <vector>
#include <optional>

namespace octoval {

/// Axis-aligned box in R^16.
struct Box {
    Vec16 lo = Vec16::Zero();
    Vec16 hi = Vec16::Zero();

    static Box cube(const Vec16& center, double half_width) {
        Box b;
        b.lo = center.array() - half_width;
        b.hi = center.array() + half_width;
        return b;
    }
    static Box centered_cube(double half_width) { return cube(Vec16::Zero(), half_width); }

    bool contains(const Vec16& x, double slack = 0.0) const {
        return (x.array() >= lo.array() - slack).all() && (x.array() <= hi.array() + slack).all();
    }
    double volume() const { return (hi - lo).prod(); }
    Box hull(const Box& other) const {
        Box b;
        b.lo = lo.cwiseMin(other.lo);
        b.hi = hi.cwiseMax(other.hi);
        return b;
    }
    Vec16 sample(Rng& rng) const {
        Vec16 x;
        for (int i = 0; i < 16; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
        return x;
    }
};

/// Real-valued function on R^16 with an evaluation contract and
/// finite-difference metadata. Analytic gradient/Hessian callbacks are
/// optional; when present they bypass the FD stencils.
struct ScalarField {
    enum class Smoothness { QuadraticExact, Smooth, Continuous };

    std::function<double(const Vec16&)> eval;
    double fd_step = 1e-3; // scaled by (1 + |point|) at use sites
    Smoothness hint = Smoothness::Smooth;
    std::function<Vec16(const Vec16&)> grad;
    std::function<Mat16(const Vec16&)> hess;
    std::optional<Box> support;

    double operator()(const Vec16& x) const { return eval(x); }
    double step_at(const Vec16& x) const { return fd_step * (1.0 + x.norm()); }
};

/// Affine octonionic line {base + xi * x : x in O}. The line of a direction
/// class is the cone over its Hopf fiber; the span {xi * x} realizes it only
/// for chart representatives (a, 1) or (1, b), so the constructor replaces
/// the given direction by the unit chart representative of its Hopf class.
/// Directions with the same hopf_class then give the same point set.
struct AffineLine {
    OctoVec2 direction; // unit chart representative
    Vec16 base = Vec16::Zero();

    AffineLine() { direction.q1 = Octonion(1.0); }
    AffineLine(const OctoVec2& dir, const Vec16& base_pt) : base(base_pt) {
        const double n = norm(dir);
        if (n == 0.0) throw std::domain_error("AffineLine: zero direction");
        if (norm(dir.q2) >= norm(dir.q1)) {
            const Octonion a = mul(dir.q1, inverse(dir.q2));
            direction = OctoVec2(a, Octonion(1.0));
        } else {
            const Octonion b = mul(dir.q2, inverse(dir.q1));
            direction = OctoVec2(Octonion(1.0), b);
        }
        direction = direction * (1.0 / norm(direction));
    }

    Vec16 point_at(const Octonion& x) const { return base + scale_right(direction, x).coords(); }
};

/// Orthonormal frames of the line's 8-plane and its orthogonal complement.
/// tangent column s is xi * e_s; the normal frame is built by deterministic
/// Gram-Schmidt from coordinate seeds.
struct LineFrame {
    Eigen::Matrix<double, 16, 8> tangent;
    Eigen::Matrix<double, 16, 8> normal;
};
LineFrame line_frame(const AffineLine& line);

/// Squared distance data: the projection of v onto the line's normal space.
Eigen::Matrix<double, 8, 1> normal_coords(const LineFrame& frame, const Vec16& v);

/// Smooth bump of unit mass supported in the ball of radius 1/n.
struct Mollifier {
    enum class Profile { Poly8, ExpBump };
    int n = 1;
    Profile profile = Profile::Poly8;

    Mollifier() = default;
    explicit Mollifier(int n_, Profile p = Profile::Poly8);

    /// Normalized density at y (zero outside the 1/n ball).
    double density(const Vec16& y) const;
    /// Inverse CDF of the radial distribution on [0, 1] (unit-scale radius).
    double radius_from_uniform(double u) const;

private:
    double norm_const_ = 1.0;
    std::vector<double> cdf_; // on a uniform grid over [0, 1]
};

/// Dirac operator of an octonion-valued function of one octonionic variable.
/// conjugated = true: sum e_i dF/dx_i; false: sum (dF/dx_i) conj(e_i).
Octonion dirac(const std::function<Octonion(const Octonion&)>& f, const Octonion& point,
               bool conjugated, double fd_step = 1e-5);

/// First Dirac derivative of a real field on O^2 with respect to variable
/// var (1 or 2). conjugated = true gives sum_l e_l df/dx_l; false gives the
/// octonionic conjugate of that (f real).
Octonion dirac_grad(const ScalarField& f, const Vec16& point, int var, bool conjugated);

struct HessianResult {
    HMatrix2 value;
    double asymmetry = 0.0; // max |entry| of H12 - conj(H21) before symmetrization
};

struct HessianOptions {
    bool richardson = false;
    double step_override = 0.0; // > 0 replaces the field's scaled step
};

/// Octonionic Hessian (d^2 f / d conj(q_i) d q_j) assembled from second
/// derivatives contracted with basis units. Uses the analytic Hessian
/// callback when the field carries one, second-order central differences
/// otherwise. Throws NumericalError when the pre-symmetrization asymmetry
/// exceeds 100x the reporting tolerance.
HessianResult octonionic_hessian_full(const ScalarField& f, const Vec16& point,
                                      const HessianOptions& opt = {});
inline HMatrix2 octonionic_hessian(const ScalarField& f, const Vec16& point,
                                   const HessianOptions& opt = {}) {
    return octonionic_hessian_full(f, point, opt).value;
}

/// Octonionic Hessian contracted from an explicit real Hessian matrix.
HMatrix2 contract_real_hessian(const Mat16& real_hessian);

/// 8-dimensional Laplacian of f restricted to the line, at line parameter x.
double line_laplacian(const ScalarField& f, const AffineLine& line, const Octonion& x);

struct PshReport {
    bool pass = false;
    double min_eigenvalue = 0.0;
    Vec16 worst_point = Vec16::Zero();
    int points_checked = 0;
};

/// Samples the region and checks pointwise non-negativity of the octonionic
/// Hessian through the eigenvalues of its 16x16 real form. Refuses fields
/// that are merely continuous (mollify first).
PshReport is_psh(const ScalarField& f, const Box& region, int n_points, std::uint64_t seed,
                 double tol);

/// Convolution with the mollifier, evaluated by a fixed-seed quasi-Monte-
/// Carlo point cloud over the support of delta_n. Deterministic given seed.
ScalarField mollify(const ScalarField& f, const Mollifier& m, int quad_points, std::uint64_t seed);

struct MeanEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo mean of f over the 15-sphere of the given center and radius.
MeanEstimate sphere_mean(const ScalarField& f, const Vec16& center, double radius, int n_samples,
                         std::uint64_t seed);

} // namespace octoval
