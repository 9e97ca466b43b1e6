#include "octoval/valuation.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace octoval {

namespace {

using nlohmann::ordered_json;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}

} // namespace

double unit_ball_volume(int m) {
    return std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double intrinsic_volume_ball8(int i, double s) {
    if (i < 0 || i > 8) throw std::domain_error("intrinsic_volume_ball8: i out of range");
    return binomial(8, i) * unit_ball_volume(8) / unit_ball_volume(8 - i) * std::pow(s, i);
}

double sphere15_area() { return 2.0 * std::pow(kPi, 8.0) / 5040.0; }

void validate_body(const ConvexBody& body) {
    if (const Ball* b = std::get_if<Ball>(&body)) {
        if (!(b->radius > 0.0)) throw std::domain_error("ball: radius must be positive");
        return;
    }
    if (const Ellipsoid* e = std::get_if<Ellipsoid>(&body)) {
        const double scale = e->shape.cwiseAbs().maxCoeff();
        if ((e->shape - e->shape.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
            throw std::domain_error("ellipsoid: shape matrix must be symmetric");
        Eigen::LLT<Mat16> llt(e->shape);
        if (llt.info() != Eigen::Success)
            throw std::domain_error("ellipsoid: shape matrix must be positive definite");
        return;
    }
    const Polytope& p = std::get<Polytope>(body);
    if (p.vertices.empty()) throw std::domain_error("polytope: vertex list is empty");
}

double support(const ConvexBody& body, const Vec16& x) {
    if (const Ball* b = std::get_if<Ball>(&body)) return b->center.dot(x) + b->radius * x.norm();
    if (const Ellipsoid* e = std::get_if<Ellipsoid>(&body))
        return e->center.dot(x) + std::sqrt(std::max(0.0, x.dot(e->shape * x)));
    const Polytope& p = std::get<Polytope>(body);
    double m = p.vertices.front().dot(x);
    for (const Vec16& v : p.vertices) m = std::max(m, v.dot(x));
    return m;
}

ConvexBody transform_body(const Mat16& g, const ConvexBody& body) {
    if (const Ball* b = std::get_if<Ball>(&body)) return Ball{g * b->center, b->radius};
    if (const Ellipsoid* e = std::get_if<Ellipsoid>(&body))
        return Ellipsoid{g * e->center, g * e->shape * g.transpose()};
    Polytope out;
    for (const Vec16& v : std::get<Polytope>(body).vertices) out.vertices.push_back(g * v);
    return out;
}

ConvexBody translate_body(const ConvexBody& body, const Vec16& t) {
    if (const Ball* b = std::get_if<Ball>(&body)) return Ball{b->center + t, b->radius};
    if (const Ellipsoid* e = std::get_if<Ellipsoid>(&body))
        return Ellipsoid{e->center + t, e->shape};
    Polytope out;
    for (const Vec16& v : std::get<Polytope>(body).vertices) out.vertices.push_back(v + t);
    return out;
}

std::string Smoothing::describe() const {
    std::ostringstream os;
    if (kind == Kind::LSE)
        os << "lse(beta=" << beta << ")";
    else
        os << "mollify(n=" << mollify_n << ",points=" << mollify_points << ")";
    os << ",chi=" << chi_level << ",rho=" << exclusion_radius;
    return os.str();
}

namespace {

ScalarField ball_core(double radius) {
    ScalarField f;
    f.hint = ScalarField::Smoothness::Smooth;
    f.eval = [radius](const Vec16& x) { return radius * x.norm(); };
    f.grad = [radius](const Vec16& x) { return Vec16(radius / x.norm() * x); };
    f.hess = [radius](const Vec16& x) {
        const double r = x.norm();
        const Vec16 u = x / r;
        return Mat16(radius / r * (Mat16::Identity() - u * u.transpose()));
    };
    return f;
}

ScalarField ellipsoid_core(const Mat16& shape) {
    ScalarField f;
    f.hint = ScalarField::Smoothness::Smooth;
    f.eval = [shape](const Vec16& x) { return std::sqrt(x.dot(shape * x)); };
    f.grad = [shape](const Vec16& x) {
        const Vec16 mx = shape * x;
        return Vec16(mx / std::sqrt(x.dot(mx)));
    };
    f.hess = [shape](const Vec16& x) {
        const Vec16 mx = shape * x;
        const double s = std::sqrt(x.dot(mx));
        return Mat16(shape / s - mx * mx.transpose() / (s * s * s));
    };
    return f;
}

ScalarField lse_core(const std::vector<Vec16>& centered, double beta) {
    auto verts = std::make_shared<std::vector<Vec16>>(centered);
    ScalarField f;
    f.hint = ScalarField::Smoothness::Smooth;
    auto weights = [verts, beta](const Vec16& x, std::vector<double>& w, double& lse) {
        const std::size_t m = verts->size();
        w.resize(m);
        double dmax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            w[i] = (*verts)[i].dot(x);
            dmax = std::max(dmax, w[i]);
        }
        double z = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            w[i] = std::exp(beta * (w[i] - dmax));
            z += w[i];
        }
        for (std::size_t i = 0; i < m; ++i) w[i] /= z;
        lse = dmax + std::log(z) / beta;
    };
    f.eval = [weights](const Vec16& x) {
        std::vector<double> w;
        double lse = 0.0;
        weights(x, w, lse);
        return lse;
    };
    f.grad = [verts, weights](const Vec16& x) {
        std::vector<double> w;
        double lse = 0.0;
        weights(x, w, lse);
        Vec16 g = Vec16::Zero();
        for (std::size_t i = 0; i < verts->size(); ++i) g += w[i] * (*verts)[i];
        return g;
    };
    f.hess = [verts, beta, weights](const Vec16& x) {
        std::vector<double> w;
        double lse = 0.0;
        weights(x, w, lse);
        Vec16 g = Vec16::Zero();
        for (std::size_t i = 0; i < verts->size(); ++i) g += w[i] * (*verts)[i];
        Mat16 second = Mat16::Zero();
        for (std::size_t i = 0; i < verts->size(); ++i)
            second += w[i] * (*verts)[i] * (*verts)[i].transpose();
        return Mat16(beta * (second - g * g.transpose()));
    };
    return f;
}

} // namespace

SupportField smooth_support(const ConvexBody& body, const Smoothing& smoothing) {
    validate_body(body);
    SupportField out;
    if (const Ball* b = std::get_if<Ball>(&body)) {
        out.core = ball_core(b->radius);
        out.anchor = b->center;
        out.singular_at_origin = true;
        return out;
    }
    if (const Ellipsoid* e = std::get_if<Ellipsoid>(&body)) {
        out.core = ellipsoid_core(e->shape);
        out.anchor = e->center;
        out.singular_at_origin = true;
        return out;
    }
    const Polytope& p = std::get<Polytope>(body);
    Vec16 anchor = Vec16::Zero();
    for (const Vec16& v : p.vertices) anchor += v;
    anchor /= double(p.vertices.size());
    std::vector<Vec16> centered;
    centered.reserve(p.vertices.size());
    for (const Vec16& v : p.vertices) centered.push_back(v - anchor);
    out.anchor = anchor;
    if (smoothing.kind == Smoothing::Kind::LSE) {
        if (!(smoothing.beta > 0.0)) throw std::domain_error("smooth_support: beta must be > 0");
        out.core = lse_core(centered, smoothing.beta);
    } else {
        if (smoothing.mollify_n < 1)
            throw std::domain_error("smooth_support: mollifier level must be >= 1");
        ScalarField raw;
        raw.hint = ScalarField::Smoothness::Continuous;
        auto verts = std::make_shared<std::vector<Vec16>>(centered);
        raw.eval = [verts](const Vec16& x) {
            double m = (*verts)[0].dot(x);
            for (const Vec16& v : *verts) m = std::max(m, v.dot(x));
            return m;
        };
        out.core = mollify(raw, Mollifier(smoothing.mollify_n), smoothing.mollify_points,
                           /*seed=*/0x6d6f6cULL);
        // FD on the cloud approximant needs steps wider than the kink
        // spacing; see README.
        out.core.fd_step = 0.5 / double(smoothing.mollify_n);
        out.core.hint = ScalarField::Smoothness::Smooth;
    }
    return out;
}

namespace {

/// Largest value of r^2 |det d^2 core| over a deterministic probe set at
/// radius rho; used to bound the excluded singular mass.
double probe_c0(const ScalarField& core, double rho) {
    Rng rng = Rng::stream(0xc0c0c0ULL, 0);
    double worst = 0.0;
    for (int k = 0; k < 32; ++k) {
        const Vec16 dir = rng.sphere<16>();
        const double d = std::abs(det(octonionic_hessian(core, Vec16(rho * dir))));
        worst = std::max(worst, rho * rho * d);
    }
    return worst;
}

ValuationResult from_estimate(const MeasureEstimate& est, const Smoothing& smoothing) {
    ValuationResult r;
    r.value = est.value;
    r.std_error = est.std_error;
    r.n_samples = est.n_samples;
    r.seed = est.seed;
    r.smoothing = smoothing.describe();
    r.batch_means = est.batch_means;
    return r;
}

} // namespace

ValuationResult psi_valuation(const ConvexBody& body, const TestFunction& psi,
                              const Smoothing& smoothing, std::int64_t n, std::uint64_t seed,
                              int threads) {
    const SupportField h = smooth_support(body, smoothing);
    const double rho = smoothing.exclusion_radius;
    const bool origin_inside = psi.support.contains(Vec16::Zero());
    if (h.singular_at_origin && origin_inside && !(rho > 0.0))
        throw std::domain_error(
            "psi_valuation: support-function singularity inside supp psi needs an exclusion "
            "radius");

    const ScalarField& core = h.core;
    auto density = [&](const Vec16& q) {
        if (h.singular_at_origin && q.squaredNorm() < rho * rho) return 0.0;
        const double w = psi(q);
        if (w == 0.0) return 0.0;
        return w * det(octonionic_hessian(core, q));
    };
    MeasureEstimate est = integrate_box(psi.support, n, seed, density, threads);
    if (h.singular_at_origin && origin_inside) {
        // |excluded mass| <= max|psi| near 0 * c0 * omega15 * rho^14 / 14.
        double psi_near = 0.0;
        Rng rng = Rng::stream(0x70736942ULL, 0);
        for (int k = 0; k < 16; ++k)
            psi_near = std::max(psi_near, std::abs(psi(Vec16(rho * rng.ball<16>()))));
        est.std_error += psi_near * probe_c0(core, rho) * sphere15_area() * std::pow(rho, 14.0) / 14.0;
    }
    return from_estimate(est, smoothing);
}

ValuationResult pseudo_volume(const ConvexBody& body, const Smoothing& smoothing, std::int64_t n,
                              std::uint64_t seed, int threads) {
    const SupportField h = smooth_support(body, smoothing);
    const double rho = smoothing.exclusion_radius;
    if (h.singular_at_origin && !(rho > 0.0))
        throw std::domain_error("pseudo_volume: exclusion radius must be positive for this body");

    const ScalarField& core = h.core;
    auto density = [&](const Vec16& q) {
        if (h.singular_at_origin && q.squaredNorm() < rho * rho) return 0.0;
        return det(octonionic_hessian(core, q));
    };
    MeasureEstimate est = integrate_ball(Vec16::Zero(), 1.0, n, seed, density, threads);
    if (h.singular_at_origin)
        est.std_error += probe_c0(core, rho) * sphere15_area() * std::pow(rho, 14.0) / 14.0;
    return from_estimate(est, smoothing);
}

namespace {

struct AxisBox {
    Vec16 lo, hi;
};

/// Recognize an axis-aligned box given as a vertex polytope; throws if the
/// vertex set is not the full corner set of a box.
AxisBox box_from_polytope(const Polytope& p) {
    AxisBox box;
    box.lo = p.vertices.front();
    box.hi = p.vertices.front();
    for (const Vec16& v : p.vertices) {
        box.lo = box.lo.cwiseMin(v);
        box.hi = box.hi.cwiseMax(v);
    }
    int free_axes = 0;
    for (int i = 0; i < 16; ++i)
        if (box.hi[i] > box.lo[i]) ++free_axes;
    const std::size_t expect = std::size_t(1) << free_axes;
    if (p.vertices.size() != expect)
        throw std::domain_error("additivity_residual: polytope is not a full box corner set");
    for (const Vec16& v : p.vertices)
        for (int i = 0; i < 16; ++i)
            if (v[i] != box.lo[i] && v[i] != box.hi[i])
                throw std::domain_error("additivity_residual: vertex off the box corners");
    return box;
}

} // namespace

MeasureEstimate additivity_residual(const ConvexBody& k1, const ConvexBody& k2,
                                    const TestFunction& psi, const Smoothing& smoothing,
                                    std::int64_t n, std::uint64_t seed, int threads) {
    // Union convexity is validated for axis-aligned boxes given as
    // polytopes; for other body pairs (e.g. nested bodies) the caller
    // asserts it.
    const Polytope* p1 = std::get_if<Polytope>(&k1);
    const Polytope* p2 = std::get_if<Polytope>(&k2);
    if (p1 && p2) {
        const AxisBox b1 = box_from_polytope(*p1);
        const AxisBox b2 = box_from_polytope(*p2);
        int differing = -1;
        for (int i = 0; i < 16; ++i) {
            if (b1.lo[i] != b2.lo[i] || b1.hi[i] != b2.hi[i]) {
                if (differing >= 0)
                    throw std::domain_error(
                        "additivity_residual: boxes differ in more than one axis; union is "
                        "not convex");
                differing = i;
            }
        }
        if (differing >= 0) {
            const double lo = std::max(b1.lo[differing], b2.lo[differing]);
            const double hi = std::min(b1.hi[differing], b2.hi[differing]);
            if (lo > hi)
                throw std::domain_error(
                    "additivity_residual: boxes do not overlap; union is not convex");
        }
    } else if (p1 || p2) {
        throw std::domain_error(
            "additivity_residual: mixed polytope/analytic body pairs are not supported");
    }

    const SupportField s1 = smooth_support(k1, smoothing);
    const SupportField s2 = smooth_support(k2, smoothing);
    const ScalarField h1 = fields::sum(s1.core, fields::linear(s1.anchor, 0.0));
    const ScalarField h2 = fields::sum(s2.core, fields::linear(s2.anchor, 0.0));
    const ScalarField hmax = fields::chi_max(h1, h2, smoothing.chi_level);
    const bool singular = s1.singular_at_origin || s2.singular_at_origin;
    const double rho = smoothing.exclusion_radius;
    if (singular && !(rho > 0.0))
        throw std::domain_error("additivity_residual: singular supports need an exclusion radius");

    auto density = [&](const Vec16& q, double* out) {
        out[0] = 0.0;
        if (singular && q.squaredNorm() < rho * rho) return;
        const double w = psi(q);
        if (w == 0.0) return;
        const HMatrix2 m1 = octonionic_hessian(h1, q);
        const HMatrix2 m2 = octonionic_hessian(h2, q);
        const HMatrix2 mu = octonionic_hessian(hmax, q);
        const HMatrix2 mi = m1 + m2 - mu;
        out[0] = w * (det(mu) + det(mi) - det(m1) - det(m2));
    };
    auto est = integrate_multi(psi.support, n, seed, 1, density, threads);
    return est[0];
}

ValuationResult t_valuation(const ConvexBody& body, int i, std::int64_t n_lines,
                            std::uint64_t seed) {
    validate_body(body);
    if (i < 0 || i > 8)
        throw CapabilityError("t_valuation: intrinsic volume index must be in 0..8");

    ValuationResult r;
    r.seed = seed;
    r.smoothing = "lines(hopf)";
    if (i == 0) {
        // Euler characteristic of every non-empty projection.
        r.value = 1.0;
        r.std_error = 0.0;
        r.n_samples = n_lines;
        return r;
    }
    if (const Ball* b = std::get_if<Ball>(&body)) {
        // Projection of a ball is an 8-ball of the same radius on every line.
        r.value = intrinsic_volume_ball8(i, b->radius);
        r.std_error = 0.0;
        r.n_samples = n_lines;
        return r;
    }
    const Ellipsoid* e = std::get_if<Ellipsoid>(&body);
    if (!e)
        throw CapabilityError("t_valuation: polytope projections are not supported");
    if (i != 8)
        throw CapabilityError(
            "t_valuation: intermediate intrinsic volumes are supported for balls only");

    const Mat16 shape = e->shape;
    const double kappa8 = unit_ball_volume(8);
    const std::int64_t per_batch = std::max<std::int64_t>(1, n_lines / kBatches);
    std::array<double, 16> batch{};
    for (int bidx = 0; bidx < kBatches; ++bidx) {
        Rng rng = Rng::stream(seed, std::uint64_t(bidx));
        double acc = 0.0;
        for (std::int64_t k = 0; k < per_batch; ++k) {
            const OctoVec2 xi = OctoVec2::from_coords(rng.sphere<16>());
            const AffineLine line(xi, Vec16::Zero());
            const LineFrame fr = line_frame(line);
            const Eigen::Matrix<double, 8, 8> gram =
                fr.tangent.transpose() * shape * fr.tangent;
            acc += kappa8 * std::sqrt(std::max(0.0, gram.determinant()));
        }
        batch[std::size_t(bidx)] = acc / double(per_batch);
    }
    double mean = 0.0;
    for (double b : batch) mean += b;
    mean /= kBatches;
    double var = 0.0;
    for (double b : batch) var += (b - mean) * (b - mean);
    var /= (kBatches - 1);
    r.value = mean;
    r.std_error = std::sqrt(var / kBatches);
    r.n_samples = per_batch * kBatches;
    r.batch_means = batch;
    return r;
}

double u_valuation_quadrature(const ConvexBody& body, int j) {
    const Ball* b = std::get_if<Ball>(&body);
    if (!b) throw CapabilityError("u_valuation: only balls are supported");
    if (j < 8 || j > 16) throw CapabilityError("u_valuation: j must be in 8..16");
    const int i = j - 8;
    const double r = b->radius;
    // U_j = C(8,i) kappa8/kappa_{8-i} * sigma7 * r^{8+i} * (1/2) B(4, i/2 + 1).
    const double sigma7 = 2.0 * std::pow(kPi, 4.0) / std::tgamma(4.0);
    const double beta = std::tgamma(4.0) * std::tgamma(0.5 * i + 1.0) / std::tgamma(0.5 * i + 5.0);
    return binomial(8, i) * unit_ball_volume(8) / unit_ball_volume(8 - i) * sigma7 *
           std::pow(r, 8.0 + i) * 0.5 * beta;
}

ValuationResult u_valuation(const ConvexBody& body, int j, std::int64_t n_samples,
                            std::uint64_t seed) {
    const Ball* b = std::get_if<Ball>(&body);
    if (!b) throw CapabilityError("u_valuation: only balls are supported");
    if (j < 8 || j > 16) throw CapabilityError("u_valuation: j must be in 8..16");
    const int i = j - 8;
    const double r = b->radius;

    // Offsets beyond |v| = r give empty sections and contribute 0; sample a
    // slightly larger ball so that branch is exercised.
    const double big = 1.25 * r;
    const double vol8 = unit_ball_volume(8) * std::pow(big, 8.0);
    const std::int64_t per_batch = std::max<std::int64_t>(1, n_samples / kBatches);

    ValuationResult out;
    out.seed = seed;
    out.smoothing = "sections(radial-mc)";
    std::array<double, 16> batch{};
    for (int bidx = 0; bidx < kBatches; ++bidx) {
        Rng rng = Rng::stream(seed, std::uint64_t(bidx));
        double acc = 0.0;
        for (std::int64_t k = 0; k < per_batch; ++k) {
            const Eigen::Matrix<double, 8, 1> v = big * rng.ball<8>();
            const double d2 = v.squaredNorm();
            if (d2 <= r * r) acc += intrinsic_volume_ball8(i, std::sqrt(r * r - d2));
        }
        batch[std::size_t(bidx)] = vol8 * acc / double(per_batch);
    }
    double mean = 0.0;
    for (double bm : batch) mean += bm;
    mean /= kBatches;
    double var = 0.0;
    for (double bm : batch) var += (bm - mean) * (bm - mean);
    var /= (kBatches - 1);
    out.value = mean;
    out.std_error = std::sqrt(var / kBatches);
    out.n_samples = per_batch * kBatches;
    out.batch_means = batch;
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec16 vec_from_json(const ordered_json& j) {
    if (!j.is_array() || j.size() != 16)
        throw std::invalid_argument("body json: expected an array of 16 reals");
    Vec16 v;
    for (int i = 0; i < 16; ++i) v[i] = j[std::size_t(i)].get<double>();
    return v;
}

ordered_json vec_to_json(const Vec16& v) {
    ordered_json a = ordered_json::array();
    for (int i = 0; i < 16; ++i) a.push_back(v[i]);
    return a;
}

} // namespace

ConvexBody body_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("body json: parse failure: ") + e.what());
    }
    const std::string type = j.at("type").get<std::string>();
    ConvexBody body;
    if (type == "ball") {
        Ball b;
        b.center = vec_from_json(j.at("center"));
        b.radius = j.at("radius").get<double>();
        body = b;
    } else if (type == "ellipsoid") {
        Ellipsoid e;
        e.center = vec_from_json(j.at("center"));
        const auto& rows = j.at("shape");
        if (!rows.is_array() || rows.size() != 16)
            throw std::invalid_argument("body json: shape must be 16x16");
        for (int r = 0; r < 16; ++r) {
            if (!rows[std::size_t(r)].is_array() || rows[std::size_t(r)].size() != 16)
                throw std::invalid_argument("body json: shape must be 16x16");
            for (int c = 0; c < 16; ++c)
                e.shape(r, c) = rows[std::size_t(r)][std::size_t(c)].get<double>();
        }
        body = e;
    } else if (type == "polytope") {
        Polytope p;
        for (const auto& row : j.at("vertices")) p.vertices.push_back(vec_from_json(row));
        body = p;
    } else {
        throw std::invalid_argument("body json: unknown type '" + type + "'");
    }
    validate_body(body);
    return body;
}

std::string body_to_json_text(const ConvexBody& body) {
    ordered_json j;
    if (const Ball* b = std::get_if<Ball>(&body)) {
        j["type"] = "ball";
        j["center"] = vec_to_json(b->center);
        j["radius"] = b->radius;
    } else if (const Ellipsoid* e = std::get_if<Ellipsoid>(&body)) {
        j["type"] = "ellipsoid";
        j["center"] = vec_to_json(e->center);
        ordered_json rows = ordered_json::array();
        for (int r = 0; r < 16; ++r) {
            ordered_json row = ordered_json::array();
            for (int c = 0; c < 16; ++c) row.push_back(e->shape(r, c));
            rows.push_back(row);
        }
        j["shape"] = rows;
    } else {
        const Polytope& p = std::get<Polytope>(body);
        j["type"] = "polytope";
        ordered_json rows = ordered_json::array();
        for (const Vec16& v : p.vertices) rows.push_back(vec_to_json(v));
        j["vertices"] = rows;
    }
    return j.dump();
}

std::string result_to_json_text(const ValuationResult& r) {
    ordered_json j;
    j["value"] = r.value;
    j["std_error"] = r.std_error;
    j["n_samples"] = r.n_samples;
    j["seed"] = r.seed;
    j["smoothing"] = r.smoothing;
    return j.dump();
}

} // namespace octoval
