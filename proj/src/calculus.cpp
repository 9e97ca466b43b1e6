#include "octoval/calculus.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <memory>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace octoval {

LineFrame line_frame(const AffineLine& line) {
    LineFrame fr;
    for (int s = 0; s < 8; ++s)
        fr.tangent.col(s) = scale_right(line.direction, Octonion::unit(s)).coords();

    // Complement by Gram-Schmidt over coordinate seeds, in a fixed order.
    int found = 0;
    for (int seed_axis = 0; seed_axis < 16 && found < 8; ++seed_axis) {
        Vec16 v = Vec16::Unit(seed_axis);
        for (int pass = 0; pass < 2; ++pass) {
            for (int s = 0; s < 8; ++s) v -= fr.tangent.col(s).dot(v) * fr.tangent.col(s);
            for (int s = 0; s < found; ++s) v -= fr.normal.col(s).dot(v) * fr.normal.col(s);
        }
        const double nrm = v.norm();
        if (nrm > 1e-6) fr.normal.col(found++) = v / nrm;
    }
    if (found < 8) throw NumericalError("line_frame: failed to complete the normal frame");
    return fr;
}

Eigen::Matrix<double, 8, 1> normal_coords(const LineFrame& frame, const Vec16& v) {
    return frame.normal.transpose() * v;
}

// ---------------------------------------------------------------------------
// Mollifier

Mollifier::Mollifier(int n_, Profile p) : n(n_), profile(p) {
    if (n < 1) throw std::domain_error("Mollifier: n must be >= 1");
    // Radial CDF of the density profile on the unit-scale ball: the radius
    // distribution carries the s^15 volume factor.
    const int grid = 4096;
    cdf_.assign(std::size_t(grid) + 1, 0.0);
    auto prof = [&](double s) {
        if (s >= 1.0) return 0.0;
        if (profile == Profile::Poly8) {
            const double t = 1.0 - s * s;
            double p8 = t * t;
            p8 *= p8;     // t^4
            p8 *= p8;     // t^8
            return p8;
        }
        return std::exp(-1.0 / (1.0 - s * s));
    };
    double acc = 0.0;
    double prev = 0.0;
    for (int i = 1; i <= grid; ++i) {
        const double s = double(i) / grid;
        const double val = prof(s) * std::pow(s, 15);
        acc += 0.5 * (prev + val) / grid;
        prev = val;
        cdf_[std::size_t(i)] = acc;
    }
    const double total = cdf_.back();
    if (total <= 0.0) throw NumericalError("Mollifier: degenerate profile");
    for (auto& c : cdf_) c /= total;

    // Normalization constant of the density on the 1/n ball:
    // integral = c * n^{-16} * omega15 * total  =>  c = n^16 / (omega15 * total).
    const double omega15 = 2.0 * std::pow(kPi, 8.0) / 5040.0;
    norm_const_ = std::pow(double(n), 16.0) / (omega15 * total);
}

double Mollifier::density(const Vec16& y) const {
    const double s = y.norm() * double(n);
    if (s >= 1.0) return 0.0;
    double prof;
    if (profile == Profile::Poly8) {
        const double t = 1.0 - s * s;
        double p8 = t * t;
        p8 *= p8;
        p8 *= p8;
        prof = p8;
    } else {
        prof = std::exp(-1.0 / (1.0 - s * s));
    }
    return norm_const_ * prof;
}

double Mollifier::radius_from_uniform(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t hi = std::size_t(std::max<std::ptrdiff_t>(1, it - cdf_.begin()));
    const double c0 = cdf_[hi - 1];
    const double c1 = cdf_[hi];
    const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
    return (double(hi - 1) + frac) / double(cdf_.size() - 1);
}

// ---------------------------------------------------------------------------
// Dirac operators

Octonion dirac(const std::function<Octonion(const Octonion&)>& f, const Octonion& point,
               bool conjugated, double fd_step) {
    Octonion out;
    const double h = fd_step * (1.0 + norm(point));
    for (int i = 0; i < 8; ++i) {
        Octonion p = point, q = point;
        p[i] += h;
        q[i] -= h;
        const Octonion d = (f(p) - f(q)) / (2.0 * h);
        if (conjugated)
            out += mul(Octonion::unit(i), d);
        else
            out += mul(d, conj(Octonion::unit(i)));
    }
    return out;
}

Octonion dirac_grad(const ScalarField& f, const Vec16& point, int var, bool conjugated) {
    if (var != 1 && var != 2) throw std::domain_error("dirac_grad: variable index must be 1 or 2");
    const int off = (var == 1) ? 0 : 8;
    Octonion g;
    if (f.grad) {
        const Vec16 gr = f.grad(point);
        for (int l = 0; l < 8; ++l) g[l] = gr[off + l];
    } else {
        const double h = f.step_at(point);
        for (int l = 0; l < 8; ++l) {
            Vec16 p = point, q = point;
            p[off + l] += h;
            q[off + l] -= h;
            g[l] = (f(p) - f(q)) / (2.0 * h);
        }
    }
    // g currently holds the partials; attach units.
    Octonion out;
    for (int l = 0; l < 8; ++l) {
        if (conjugated)
            out += g[l] * Octonion::unit(l);
        else
            out += g[l] * conj(Octonion::unit(l));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Octonionic Hessian

HMatrix2 contract_real_hessian(const Mat16& m) {
    HMatrix2 h;
    // Within one octonionic coordinate the off-diagonal unit products cancel
    // in pairs, so the diagonal entries are the block Laplacians.
    h.a = m.topLeftCorner<8, 8>().trace();
    h.b = m.bottomRightCorner<8, 8>().trace();
    Octonion q;
    for (int l = 0; l < 8; ++l)
        for (int mm = 0; mm < 8; ++mm) {
            const double c = m(l, 8 + mm);
            if (c != 0.0) q += c * mul(Octonion::unit(l), conj(Octonion::unit(mm)));
        }
    h.q = q;
    return h;
}

namespace {

struct RawSecond {
    std::array<double, 8> dxx{};  // f_{x_l x_l}
    std::array<double, 8> dyy{};  // f_{y_m y_m}
    Eigen::Matrix<double, 8, 8> cross = Eigen::Matrix<double, 8, 8>::Zero(); // f_{x_l y_m}
};

RawSecond fd_second(const ScalarField& f, const Vec16& p, double h) {
    RawSecond r;
    const double f0 = f(p);
    for (int i = 0; i < 16; ++i) {
        Vec16 a = p, b = p;
        a[i] += h;
        b[i] -= h;
        const double second = (f(a) - 2.0 * f0 + f(b)) / (h * h);
        if (i < 8)
            r.dxx[std::size_t(i)] = second;
        else
            r.dyy[std::size_t(i - 8)] = second;
    }
    for (int l = 0; l < 8; ++l) {
        for (int m = 0; m < 8; ++m) {
            Vec16 pp = p, pm = p, mp = p, mm = p;
            pp[l] += h;
            pp[8 + m] += h;
            pm[l] += h;
            pm[8 + m] -= h;
            mp[l] -= h;
            mp[8 + m] += h;
            mm[l] -= h;
            mm[8 + m] -= h;
            r.cross(l, m) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
    }
    return r;
}

HMatrix2 assemble(const RawSecond& r) {
    HMatrix2 h;
    for (int l = 0; l < 8; ++l) h.a += r.dxx[std::size_t(l)];
    for (int m = 0; m < 8; ++m) h.b += r.dyy[std::size_t(m)];
    Octonion q;
    for (int l = 0; l < 8; ++l)
        for (int m = 0; m < 8; ++m) {
            const double c = r.cross(l, m);
            if (c != 0.0) q += c * mul(Octonion::unit(l), conj(Octonion::unit(m)));
        }
    h.q = q;
    return h;
}

} // namespace

HessianResult octonionic_hessian_full(const ScalarField& f, const Vec16& point,
                                      const HessianOptions& opt) {
    HessianResult out;
    if (f.hess) {
        const Mat16 m = f.hess(point);
        // Entry (2,1) assembled independently from the lower cross block;
        // for a symmetric callback it is exactly conj of entry (1,2).
        Octonion q21;
        for (int mm = 0; mm < 8; ++mm)
            for (int l = 0; l < 8; ++l) {
                const double c = m(8 + mm, l);
                if (c != 0.0) q21 += c * mul(Octonion::unit(mm), conj(Octonion::unit(l)));
            }
        HMatrix2 h = contract_real_hessian(m);
        const Octonion sym = (h.q + conj(q21)) * 0.5;
        out.asymmetry = norm(h.q - conj(q21));
        h.q = sym;
        out.value = h;
    } else {
        const double h0 = (opt.step_override > 0.0) ? opt.step_override : f.step_at(point);
        const RawSecond coarse = fd_second(f, point, h0);
        if (opt.richardson) {
            const RawSecond fine = fd_second(f, point, 0.5 * h0);
            RawSecond extrap;
            for (int i = 0; i < 8; ++i) {
                extrap.dxx[std::size_t(i)] =
                    (4.0 * fine.dxx[std::size_t(i)] - coarse.dxx[std::size_t(i)]) / 3.0;
                extrap.dyy[std::size_t(i)] =
                    (4.0 * fine.dyy[std::size_t(i)] - coarse.dyy[std::size_t(i)]) / 3.0;
            }
            extrap.cross = (4.0 * fine.cross - coarse.cross) / 3.0;
            out.value = assemble(extrap);
        } else {
            out.value = assemble(coarse);
        }
        out.asymmetry = 0.0; // one shared stencil per unordered pair
    }

    const double scale =
        1.0 + std::abs(out.value.a) + std::abs(out.value.b) + 2.0 * norm(out.value.q);
    const double tol = 1e-6 * scale;
    if (out.asymmetry > 100.0 * tol)
        throw NumericalError("octonionic_hessian: mixed-derivative asymmetry " +
                             std::to_string(out.asymmetry) + " exceeds 100x tolerance");
    return out;
}

double line_laplacian(const ScalarField& f, const AffineLine& line, const Octonion& x) {
    const Vec16 p = line.point_at(x);
    const LineFrame fr = line_frame(line);
    if (f.hess) {
        const Mat16 m = f.hess(p);
        double sum = 0.0;
        for (int s = 0; s < 8; ++s) sum += fr.tangent.col(s).dot(m * fr.tangent.col(s));
        return sum;
    }
    const double h = f.step_at(p);
    const double f0 = f(p);
    double sum = 0.0;
    for (int s = 0; s < 8; ++s) {
        const Vec16 d = h * fr.tangent.col(s);
        sum += (f(p + d) - 2.0 * f0 + f(p - d)) / (h * h);
    }
    return sum;
}

PshReport is_psh(const ScalarField& f, const Box& region, int n_points, std::uint64_t seed,
                 double tol) {
    if (f.hint == ScalarField::Smoothness::Continuous)
        throw std::domain_error(
            "is_psh: field is merely continuous; mollify it before checking");
    PshReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    Rng rng = Rng::stream(seed, 0);
    for (int k = 0; k < n_points; ++k) {
        const Vec16 p = region.sample(rng);
        const HMatrix2 h = octonionic_hessian(f, p);
        Eigen::SelfAdjointEigenSolver<Mat16> es(embed_j(h), Eigen::EigenvaluesOnly);
        const double lam = es.eigenvalues().minCoeff();
        if (lam < rep.min_eigenvalue) {
            rep.min_eigenvalue = lam;
            rep.worst_point = p;
        }
        ++rep.points_checked;
    }
    rep.pass = rep.min_eigenvalue >= -tol;
    return rep;
}

ScalarField mollify(const ScalarField& f, const Mollifier& m, int quad_points,
                    std::uint64_t seed) {
    if (quad_points < 1) throw std::domain_error("mollify: need at least one quadrature point");

    // Fixed-seed QMC cloud drawn from the mollifier density itself (equal
    // weights): Halton points with a Cranley-Patterson rotation, mapped
    // through Box-Muller to a direction and through the radial inverse CDF.
    Rng shift_rng = Rng::stream(seed, 0x6d6f6c6cULL);
    std::array<double, 17> shift{};
    for (auto& s : shift) s = shift_rng.uniform();

    // Antithetic pairs (+y, -y): odd moments of the cloud vanish exactly, so
    // affine fields are reproduced to roundoff.
    auto cloud = std::make_shared<std::vector<Vec16>>();
    const int half = (quad_points + 1) / 2;
    cloud->reserve(2 * std::size_t(half));
    const double radius_scale = 1.0 / double(m.n);
    for (int k = 1; k <= half; ++k) {
        std::array<double, 17> u{};
        for (int d = 0; d < 17; ++d) {
            double v = halton(std::uint64_t(k), kHaltonPrimes[std::size_t(d)]) + shift[std::size_t(d)];
            v -= std::floor(v);
            u[std::size_t(d)] = std::min(std::max(v, 1e-12), 1.0 - 1e-12);
        }
        Vec16 g;
        for (int pair = 0; pair < 8; ++pair) {
            const double r = std::sqrt(-2.0 * std::log(u[std::size_t(2 * pair)]));
            const double th = 2.0 * kPi * u[std::size_t(2 * pair + 1)];
            g[2 * pair] = r * std::cos(th);
            g[2 * pair + 1] = r * std::sin(th);
        }
        const double gn = g.norm();
        if (gn == 0.0) continue;
        const double s = m.radius_from_uniform(u[16]);
        const Vec16 y = (radius_scale * s / gn) * g;
        cloud->push_back(y);
        cloud->push_back(-y);
    }

    ScalarField out;
    out.fd_step = f.fd_step;
    out.hint = ScalarField::Smoothness::Smooth;
    const auto base_eval = f.eval;
    out.eval = [base_eval, cloud](const Vec16& x) {
        double acc = 0.0;
        for (const auto& y : *cloud) acc += base_eval(x - y);
        return acc / double(cloud->size());
    };
    if (f.grad) {
        const auto base_grad = f.grad;
        out.grad = [base_grad, cloud](const Vec16& x) {
            Vec16 acc = Vec16::Zero();
            for (const auto& y : *cloud) acc += base_grad(x - y);
            return Vec16(acc / double(cloud->size()));
        };
    }
    if (f.hess) {
        const auto base_hess = f.hess;
        out.hess = [base_hess, cloud](const Vec16& x) {
            Mat16 acc = Mat16::Zero();
            for (const auto& y : *cloud) acc += base_hess(x - y);
            return Mat16(acc / double(cloud->size()));
        };
    }
    if (f.support) {
        Box enlarged = *f.support;
        enlarged.lo.array() -= radius_scale;
        enlarged.hi.array() += radius_scale;
        out.support = enlarged;
    }
    return out;
}

MeanEstimate sphere_mean(const ScalarField& f, const Vec16& center, double radius, int n_samples,
                         std::uint64_t seed) {
    const int batches = 16;
    const int per_batch = std::max(1, n_samples / batches);
    std::array<double, 16> means{};
    for (int b = 0; b < batches; ++b) {
        Rng rng = Rng::stream(seed, std::uint64_t(b));
        double acc = 0.0;
        for (int k = 0; k < per_batch; ++k) acc += f(center + radius * rng.sphere<16>());
        means[std::size_t(b)] = acc / per_batch;
    }
    MeanEstimate est;
    for (double mv : means) est.value += mv;
    est.value /= batches;
    double var = 0.0;
    for (double mv : means) var += (mv - est.value) * (mv - est.value);
    var /= (batches - 1);
    est.std_error = std::sqrt(var / batches);
    return est;
}

} // namespace octoval
