#include <doctest.h>

#include "octoval/measure.hpp"

using namespace octoval;

namespace {

Box small_box() { return Box::centered_cube(0.6); }

ScalarField shifted_normsq(const Vec16& a) {
    ScalarField f;
    f.hint = ScalarField::Smoothness::Smooth;
    f.eval = [a](const Vec16& x) { return (x - a).squaredNorm(); };
    return f;
}

ScalarField psd_quadratic(Rng& rng, double scale = 1.0) {
    Mat16 r;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) r(i, j) = rng.uniform(-1.0, 1.0);
    return fields::quadform(Mat16(scale * 0.1 * (r.transpose() * r)));
}

} // namespace

TEST_CASE("chi ramp properties") {
    CHECK(chi(-1.0) == 0.0);
    CHECK(chi(-5.0) == 0.0);
    CHECK(chi(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(chi(3.7) == 3.7);
    CHECK(chi(0.0) == doctest::Approx(0.15625).epsilon(1e-14));
    CHECK(chi_prime(-1.0) == 0.0);
    CHECK(chi_prime(1.0) == 1.0);
    CHECK(chi_second(-1.0) == 0.0);
    CHECK(chi_second(1.0) == 0.0);
    for (int i = 0; i <= 50; ++i) {
        const double x = -1.2 + 2.4 * i / 50.0;
        CHECK(chi_prime(x) >= 0.0);
        CHECK(chi_prime(x) <= 1.0);
        CHECK(chi_second(x) >= 0.0);
        CHECK(chi(x) >= std::max(0.0, x));
        // FD consistency of the closed-form derivatives.
        const double h = 1e-5;
        CHECK(std::abs((chi(x + h) - chi(x - h)) / (2 * h) - chi_prime(x)) <= 1e-8);
        CHECK(std::abs((chi(x + h) - 2 * chi(x) + chi(x - h)) / (h * h) - chi_second(x)) <= 1e-4);
    }
}

TEST_CASE("integrate_box is deterministic and thread-count independent") {
    const Box box = small_box();
    auto density = [](const Vec16& q) { return q.squaredNorm() + q[3]; };
    const MeasureEstimate a = integrate_box(box, 4096, 17, density, 1);
    const MeasureEstimate b = integrate_box(box, 4096, 17, density, 1);
    const MeasureEstimate c = integrate_box(box, 4096, 17, density, 4);
    CHECK(a.value == b.value);
    CHECK(a.value == c.value);
    CHECK(a.std_error == c.std_error);
    // Sanity: integral of |q|^2 over the cube [-0.6, 0.6]^16 is 16 * Var * vol.
    const double vol = std::pow(1.2, 16.0);
    const double expect = vol * 16.0 * 0.36 / 3.0;
    CHECK(std::abs(a.value - expect) <= 4.0 * a.std_error + 1e-9);
}

TEST_CASE("ma_integral on constant-Hessian fields") {
    const TestFunction psi = TestFunction::bump_in_box(small_box());
    const std::int64_t n = 1 << 12;

    const MeasureEstimate psi_mass = integrate_box(psi.support, n, 5, psi.field.eval);
    const MeasureEstimate full = ma_integral(fields::normsq(), psi, n, 5);
    CHECK(full.value == doctest::Approx(256.0 * psi_mass.value).epsilon(1e-13));

    Vec16 v = Vec16::Zero();
    v[2] = 1.5;
    const MeasureEstimate lin = ma_integral(fields::linear(v, 0.5), psi, n, 5);
    CHECK(lin.value == 0.0);

    Rng rng(61);
    for (int t = 0; t < 5; ++t) {
        const HMatrix2 a = random_hmatrix(rng);
        const MeasureEstimate est = ma_integral(fields::quadform(embed_j(a)), psi, n, 5);
        CHECK(est.value == doctest::Approx(256.0 * det(a) * psi_mass.value).epsilon(1e-12));
    }

    CHECK_THROWS_AS((void)ma_integral(fields::abs_norm(), psi, 64, 5), std::domain_error);

    // Non-negativity for a psh field against a non-negative weight.
    const MeasureEstimate pos = ma_integral(psd_quadratic(rng), psi, n, 5);
    CHECK(pos.value >= -3.0 * pos.std_error);
}

TEST_CASE("mixed_ma_integral: diagonal, degenerate, and non-negative cases") {
    const TestFunction psi = TestFunction::bump_in_box(small_box());
    const std::int64_t n = 1 << 12;
    Rng rng(62);

    const ScalarField f = psd_quadratic(rng);
    CHECK(mixed_ma_integral(f, f, psi, n, 9).value == ma_integral(f, psi, n, 9).value);

    Vec16 v = Vec16::Zero();
    v[11] = 2.0;
    CHECK(mixed_ma_integral(fields::normsq(), fields::linear(v, 0.0), psi, n, 9).value == 0.0);

    const ScalarField g = psd_quadratic(rng);
    const MeasureEstimate est = mixed_ma_integral(f, g, psi, n, 9);
    CHECK(est.value >= -3.0 * est.std_error);

    // Symmetry in (f, g) is exact for the shared sampler.
    CHECK(mixed_ma_integral(f, g, psi, n, 9).value == mixed_ma_integral(g, f, psi, n, 9).value);
}

TEST_CASE("tau: zeros, exact symmetry in the determinant slots") {
    Rng rng(63);
    const ScalarField f0 = fields::smooth_box_bump(Box::centered_cube(0.8), 0.7);
    const ScalarField f1 = fields::smooth_box_bump(Box::cube(Vec16::Unit(0) * 0.1, 0.7), 1.1);
    const ScalarField f2 = fields::smooth_box_bump(Box::cube(Vec16::Unit(9) * -0.1, 0.75), 0.9);

    ScalarField zero = fields::scaled(0.0, f0);
    CHECK(tau(zero, f1, f2, 1 << 10, 3).value == 0.0);
    CHECK(tau(f0, f1, f2, 1 << 10, 3).value == tau(f0, f2, f1, 1 << 10, 3).value);

    ScalarField unbounded = fields::normsq();
    CHECK_THROWS_AS((void)tau(f0, f1, unbounded, 64, 3), std::domain_error);
}

TEST_CASE("tau is symmetric under moving a field into the weight slot") {
    Rng rng(64);
    for (int rep = 0; rep < 3; ++rep) {
        Vec16 c0 = Vec16::Zero(), c1 = Vec16::Zero(), c2 = Vec16::Zero();
        for (int i = 0; i < 16; ++i) {
            c0[i] = rng.uniform(-0.1, 0.1);
            c1[i] = rng.uniform(-0.1, 0.1);
            c2[i] = rng.uniform(-0.1, 0.1);
        }
        const ScalarField f0 =
            fields::smooth_box_bump(Box::cube(c0, rng.uniform(0.6, 0.9)), rng.uniform(0.5, 1.5));
        const ScalarField f1 =
            fields::smooth_box_bump(Box::cube(c1, rng.uniform(0.6, 0.9)), rng.uniform(0.5, 1.5));
        const ScalarField f2 =
            fields::smooth_box_bump(Box::cube(c2, rng.uniform(0.6, 0.9)), rng.uniform(0.5, 1.5));

        const std::int64_t n = 1 << 14;
        const std::uint64_t seed = 100 + std::uint64_t(rep);
        const MeasureEstimate t012 = tau(f0, f1, f2, n, seed);
        const MeasureEstimate t102 = tau(f1, f0, f2, n, seed);
        const MeasureEstimate diff = estimate_difference(t012, t102);
        CHECK(std::abs(diff.value) <= 3.0 * diff.std_error + 1e-9);
    }
}

TEST_CASE("chain rule for the Hessian of the chi composite") {
    Rng rng(65);
    const ScalarField u = psd_quadratic(rng);
    Vec16 shift;
    for (int i = 0; i < 16; ++i) shift[i] = rng.uniform(-0.4, 0.4);
    const ScalarField v = shifted_normsq(shift);
    const double j = 3.0;

    ScalarField alpha;
    alpha.hint = ScalarField::Smoothness::Smooth;
    alpha.eval = [&](const Vec16& x) { return u(x) - v(x); };

    ScalarField composite;
    composite.hint = ScalarField::Smoothness::Smooth;
    composite.eval = [&, j](const Vec16& x) { return chi(j * alpha(x)) / j; };

    HessianOptions opt;
    opt.richardson = true;
    opt.step_override = 1e-3;
    for (int t = 0; t < 10; ++t) {
        Vec16 p;
        for (int i = 0; i < 16; ++i) p[i] = rng.uniform(-0.5, 0.5);
        const HMatrix2 lhs = octonionic_hessian(composite, p, opt);

        const double a = alpha(p);
        const HMatrix2 ha = octonionic_hessian(alpha, p, opt);
        const Octonion g1 = dirac_grad(alpha, p, 1, true);
        const Octonion g2 = dirac_grad(alpha, p, 2, true);
        HMatrix2 outer;
        outer.a = norm_sq(g1);
        outer.b = norm_sq(g2);
        outer.q = mul(g1, conj(g2));
        const HMatrix2 rhs = ha * chi_prime(j * a) + outer * (j * chi_second(j * a));
        const double scale = 1.0 + entry_norm(rhs) + entry_norm(lhs);
        CHECK(max_abs_diff(lhs, rhs) <= 2e-5 * std::abs(scale));
    }
}

TEST_CASE("chi-smoothed max dominates the max, decreases in level, and stays psh") {
    Rng rng(66);
    const ScalarField u = psd_quadratic(rng);
    Vec16 shift;
    for (int i = 0; i < 16; ++i) shift[i] = rng.uniform(-0.3, 0.3);
    const ScalarField v = shifted_normsq(shift);

    const ScalarField s2 = fields::chi_max(u, v, 2.0);
    const ScalarField s4 = fields::chi_max(u, v, 4.0);
    const ScalarField s8 = fields::chi_max(u, v, 8.0);
    for (int t = 0; t < 200; ++t) {
        Vec16 p;
        for (int i = 0; i < 16; ++i) p[i] = rng.uniform(-0.8, 0.8);
        const double m = std::max(u(p), v(p));
        CHECK(s2(p) >= s4(p) - 1e-14);
        CHECK(s4(p) >= s8(p) - 1e-14);
        CHECK(s8(p) >= m - 1e-14);
        CHECK(s8(p) <= m + chi(0.0) / 8.0 + 1e-14);
    }

    // With callbacks on both arguments the chi-max field is itself psh.
    ScalarField v_cb = fields::quadform(Mat16::Identity());
    const ScalarField vq = fields::compose_linear(v_cb, Mat16::Identity(), -shift);
    const ScalarField smooth_cb = fields::chi_max(u, vq, 4.0);
    const PshReport rep = is_psh(smooth_cb, Box::centered_cube(0.7), 40, 8, 1e-8);
    CHECK(rep.pass);
}

TEST_CASE("blocki_residual degenerate cases vanish") {
    Rng rng(67);
    const ScalarField u = psd_quadratic(rng);
    const TestFunction psi = TestFunction::bump_in_box(small_box());
    const std::vector<double> levels = {2.0, 4.0};

    const BlockiReport same = blocki_residual(u, u, psi, levels, 1 << 10, 21);
    for (const auto& lvl : same.levels) {
        CHECK(std::abs(lvl.residual_max.value) <=
              3.0 * lvl.residual_max.std_error + 1e-8 * (1.0 + lvl.largest_term));
        CHECK(std::abs(lvl.residual_min.value) <=
              3.0 * lvl.residual_min.std_error + 1e-8 * (1.0 + lvl.largest_term));
    }

    ScalarField below;
    below.hint = ScalarField::Smoothness::Smooth;
    const auto ue = u.eval;
    below.eval = [ue](const Vec16& x) { return ue(x) - 1.0; };
    const BlockiReport ordered = blocki_residual(u, below, psi, levels, 1 << 10, 22);
    for (const auto& lvl : ordered.levels) {
        CHECK(std::abs(lvl.residual_max.value) <=
              3.0 * lvl.residual_max.std_error + 1e-6 * (1.0 + lvl.largest_term));
    }
}

TEST_CASE("blocki_residual on a genuinely crossing non-affine pair decreases in level") {
    // alpha = u - v is quadratic here (not affine), so the determinant-
    // identity defect is nonzero at finite smoothing and must decay like 1/j.
    const ScalarField u = fields::normsq();
    Vec16 a = Vec16::Zero();
    a[0] = 0.3;
    ScalarField u_fd, v_fd;
    u_fd.hint = v_fd.hint = ScalarField::Smoothness::Smooth;
    u_fd.eval = u.eval;
    v_fd.eval = [a](const Vec16& x) { return 0.8 * (x - a).squaredNorm() + 0.3; };

    const TestFunction psi = TestFunction::bump_in_box(small_box());
    const BlockiReport rep = blocki_residual(u_fd, v_fd, psi, {2.0, 4.0, 8.0}, 1 << 12, 23);
    REQUIRE(rep.levels.size() == 3);
    const double r2 = std::abs(rep.levels[0].residual_max.value);
    const double r4 = std::abs(rep.levels[1].residual_max.value);
    const double r8 = std::abs(rep.levels[2].residual_max.value);
    CHECK(r2 > 5.0 * rep.levels[0].residual_max.std_error); // non-vacuous at coarse level
    const double s24 = rep.levels[0].residual_max.std_error + rep.levels[1].residual_max.std_error;
    const double s48 = rep.levels[1].residual_max.std_error + rep.levels[2].residual_max.std_error;
    CHECK(r4 <= r2 + 2.0 * s24);
    CHECK(r8 <= r4 + 2.0 * s48);
    CHECK(r8 <= 0.05 * rep.levels[2].largest_term + 3.0 * rep.levels[2].residual_max.std_error);

    // The min-form residual tracks the max-form one (max/min complementarity).
    CHECK(std::abs(rep.levels[2].residual_min.value) <=
          0.05 * rep.levels[2].largest_term + 3.0 * rep.levels[2].residual_min.std_error);
}

TEST_CASE("ma_integral is stable under uniform perturbations") {
    Rng rng(69);
    const ScalarField f = psd_quadratic(rng);
    const TestFunction psi = TestFunction::bump_in_box(small_box());
    const ScalarField bump = fields::ball_bump(Vec16::Zero(), 0.9, 4, 1.0);
    const std::int64_t n = 1 << 12;

    auto ma_of = [&](double eps) {
        return ma_integral(fields::sum(f, fields::scaled(eps, bump)), psi, n, 31);
    };
    const MeasureEstimate base = ma_integral(f, psi, n, 31);
    const double d_04 = std::abs(ma_of(0.04).value - base.value);
    const double d_02 = std::abs(ma_of(0.02).value - base.value);
    const double d_01 = std::abs(ma_of(0.01).value - base.value);
    const double c_fit = std::max(d_04 / 0.04, d_02 / 0.02);
    CHECK(d_01 <= 2.0 * c_fit * 0.01 + 3.0 * base.std_error + 1e-12);
}

TEST_CASE("Monge-Ampere masses of mollified approximants form a Cauchy-like sequence") {
    Rng rng(70);
    const ScalarField a = psd_quadratic(rng);
    const ScalarField b = psd_quadratic(rng);
    ScalarField h = fields::pointwise_max(a, fields::sum(b, fields::linear(Vec16::Unit(4) * 0.5, 0.05)));

    const TestFunction psi = TestFunction::bump_in_box(small_box());
    const std::int64_t n = 1 << 11;
    const MeasureEstimate m4 = ma_integral(mollify(h, Mollifier(4), 128, 3), psi, n, 33);
    const MeasureEstimate m8 = ma_integral(mollify(h, Mollifier(8), 128, 3), psi, n, 33);
    const MeasureEstimate m16 = ma_integral(mollify(h, Mollifier(16), 128, 3), psi, n, 33);
    const double d1 = std::abs(m4.value - m8.value);
    const double d2 = std::abs(m8.value - m16.value);
    CHECK(d2 <= d1 + 2.0 * (m8.std_error + m16.std_error) + 1e-9);
}
