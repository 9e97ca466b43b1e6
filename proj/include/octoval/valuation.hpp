#pragma once

#include "octoval/measure.hpp"
#include "octoval/spin.hpp"

#include <string>
#include <variant>
#include <vector>

namespace octoval {

struct Ball {
    Vec16 center = Vec16::Zero();
    double radius = 1.0;
};

/// {x : (x - c)^T M^{-1} (x - c) <= 1} with M positive definite;
/// support function <c, x> + sqrt(x^T M x).
struct Ellipsoid {
    Vec16 center = Vec16::Zero();
    Mat16 shape = Mat16::Identity();
};

struct Polytope {
    std::vector<Vec16> vertices;
};

using ConvexBody = std::variant<Ball, Ellipsoid, Polytope>;

/// Throws std::domain_error if the body parameters are invalid
/// (non-positive radius, non-PD shape, empty vertex list).
void validate_body(const ConvexBody& body);

/// h_K(x) = sup_{y in K} <x, y>.
double support(const ConvexBody& body, const Vec16& x);

/// Body moved through a linear map (vertices/centers mapped, shape
/// congruence-transformed) -- used for group-invariance checks.
ConvexBody transform_body(const Mat16& g, const ConvexBody& body);

ConvexBody translate_body(const ConvexBody& body, const Vec16& t);

struct Smoothing {
    enum class Kind { LSE, Mollify };
    Kind kind = Kind::LSE;
    double beta = 128.0;         // log-sum-exp sharpness (polytopes)
    int mollify_n = 8;           // mollifier level for the cross-check path
    int mollify_points = 256;    // quadrature cloud size for that path
    double chi_level = 32.0;     // smooth-max level for union/intersection
    double exclusion_radius = 0.02; // singularity exclusion (ball/ellipsoid)

    std::string describe() const;
};

/// Support function split into a smooth core and its linear part:
/// h(x) = core(x) + <anchor, x>. The Hessian path uses only the core, which
/// makes translation invariance of the valuations structural.
struct SupportField {
    ScalarField core;
    Vec16 anchor = Vec16::Zero();
    bool singular_at_origin = false; // core not C^2 at x = 0

    double full(const Vec16& x) const { return core(x) + anchor.dot(x); }
};

/// Ball/ellipsoid: exact analytic core away from the origin. Polytope: LSE
/// over centered vertices (uniform error <= log(#vertices)/beta) or the
/// mollified max for the cross-check path.
SupportField smooth_support(const ConvexBody& body, const Smoothing& smoothing);

struct ValuationResult {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::string smoothing;
    std::array<double, 16> batch_means{};
};

/// int psi(q) det(d^2 h_K)(q) dq by Monte Carlo over supp psi. An exclusion
/// ball around the support-function singularity is removed from sampling and
/// its mass bound added to the error bar.
ValuationResult psi_valuation(const ConvexBody& body, const TestFunction& psi,
                              const Smoothing& smoothing, std::int64_t n, std::uint64_t seed,
                              int threads = 0);

/// P(K) = int_D det(d^2 h_K) dq over the unit centered ball.
ValuationResult pseudo_volume(const ConvexBody& body, const Smoothing& smoothing, std::int64_t n,
                              std::uint64_t seed, int threads = 0);

/// |val(K1 u K2) + val(K1 n K2) - val(K1) - val(K2)| with the union and
/// intersection realized through the chi-smoothed max/min of the two
/// smoothed support functions, all integrals sharing one sample stream.
/// K1, K2 must be axis-aligned boxes (given as polytopes) whose union is
/// convex; otherwise throws std::domain_error.
MeasureEstimate additivity_residual(const ConvexBody& k1, const ConvexBody& k2,
                                    const TestFunction& psi, const Smoothing& smoothing,
                                    std::int64_t n, std::uint64_t seed, int threads = 0);

/// Mean intrinsic volume of the projections onto octonionic lines through 0,
/// lines sampled by the Hopf pushforward of the uniform S^15 measure.
/// Balls: any i in 0..8 (closed form per line, zero variance).
/// Ellipsoids: i = 0 or 8 only. Throws CapabilityError otherwise.
ValuationResult t_valuation(const ConvexBody& body, int i, std::int64_t n_lines,
                            std::uint64_t seed);

/// Mean intrinsic volume of sections by affine octonionic lines, normalized
/// as (probability on lines through 0) x (Lebesgue on the normal space).
/// Balls only, j in 8..16. Monte-Carlo estimate; see u_valuation_quadrature
/// for the 1-D radial quadrature it is cross-checked against.
ValuationResult u_valuation(const ConvexBody& body, int j, std::int64_t n_samples,
                            std::uint64_t seed);

/// Exact 1-D quadrature value of u_valuation for balls.
double u_valuation_quadrature(const ConvexBody& body, int j);

/// Volume of the unit m-ball.
double unit_ball_volume(int m);

/// Intrinsic volume V_i of an 8-ball of radius s.
double intrinsic_volume_ball8(int i, double s);

/// Surface measure of S^15.
double sphere15_area();

// JSON round trip for the body file schema and result emission.
ConvexBody body_from_json_text(const std::string& text);
std::string body_to_json_text(const ConvexBody& body);
std::string result_to_json_text(const ValuationResult& r);

} // namespace octoval
