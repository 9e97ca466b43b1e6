#include <doctest.h>

#include "octoval/valuation.hpp"

using namespace octoval;

namespace {

Polytope square(int axis0, double lo0, double hi0, int axis1, double lo1, double hi1) {
    Polytope p;
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1) {
            Vec16 v = Vec16::Zero();
            v[axis0] = s0 ? hi0 : lo0;
            v[axis1] = s1 ? hi1 : lo1;
            p.vertices.push_back(v);
        }
    return p;
}

Vec16 random_vec(Rng& rng, double scale) {
    Vec16 v;
    for (int i = 0; i < 16; ++i) v[i] = rng.uniform(-scale, scale);
    return v;
}

} // namespace

TEST_CASE("support function basics") {
    Rng rng(81);
    const ConvexBody ball = Ball{Vec16::Zero(), 1.0};
    const Vec16 x = random_vec(rng, 1.0);
    CHECK(support(ball, x) == doctest::Approx(x.norm()).epsilon(1e-14));

    const Vec16 p = random_vec(rng, 1.0);
    const ConvexBody point = Polytope{{p}};
    CHECK(support(point, x) == doctest::Approx(p.dot(x)).epsilon(1e-13));

    const Vec16 t = random_vec(rng, 1.0);
    const ConvexBody shifted = translate_body(ball, t);
    for (int k = 0; k < 20; ++k) {
        const Vec16 y = random_vec(rng, 1.0);
        CHECK(support(shifted, y) ==
              doctest::Approx(support(ball, y) + t.dot(y)).epsilon(1e-12));
    }
}

TEST_CASE("support functions are convex and 1-homogeneous (spot check)") {
    Rng rng(82);
    Mat16 r = Mat16::Random();
    const Mat16 shape = Mat16(r.transpose() * r) + 0.2 * Mat16::Identity();
    const std::vector<ConvexBody> bodies = {
        Ball{random_vec(rng, 0.5), 0.8},
        Ellipsoid{random_vec(rng, 0.5), shape},
        ConvexBody(square(0, -0.5, 0.7, 8, -0.4, 0.6)),
    };
    for (const auto& body : bodies) {
        for (int k = 0; k < 1000; ++k) {
            const Vec16 x = random_vec(rng, 1.0);
            const Vec16 y = random_vec(rng, 1.0);
            const double hx = support(body, x);
            CHECK(support(body, Vec16(x + y)) <= hx + support(body, y) + 1e-12);
            CHECK(support(body, Vec16(2.0 * x)) == doctest::Approx(2.0 * hx).epsilon(1e-13));
        }
    }
}

TEST_CASE("body validation") {
    CHECK_THROWS_AS(validate_body(Ball{Vec16::Zero(), -1.0}), std::domain_error);
    CHECK_THROWS_AS(validate_body(Polytope{}), std::domain_error);
    Mat16 notpd = Mat16::Identity();
    notpd(3, 3) = -1.0;
    CHECK_THROWS_AS(validate_body(Ellipsoid{Vec16::Zero(), notpd}), std::domain_error);
}

TEST_CASE("smooth_support: LSE properties") {
    Smoothing sm;
    sm.beta = 64.0;

    // Singleton: exact linear support, zero core.
    Rng rng(83);
    const Vec16 p = random_vec(rng, 1.0);
    const SupportField single = smooth_support(Polytope{{p}}, sm);
    const Vec16 x = random_vec(rng, 1.0);
    CHECK(single.core(x) == 0.0);
    CHECK(single.full(x) == doctest::Approx(p.dot(x)).epsilon(1e-13));

    // LSE bracket: 0 <= lse - max <= log(m)/beta on a test grid.
    const ConvexBody sq = square(0, -0.5, 0.5, 8, -0.25, 0.75);
    const SupportField sf = smooth_support(sq, sm);
    const double bound = std::log(4.0) / sm.beta;
    for (int k = 0; k < 500; ++k) {
        const Vec16 y = random_vec(rng, 1.0);
        const double gap = sf.full(y) - support(sq, y);
        CHECK(gap >= -1e-12);
        CHECK(gap <= bound + 1e-12);
    }

    // Smoothed support stays psh (it is convex).
    CHECK(is_psh(sf.core, Box::centered_cube(1.0), 30, 5, 1e-7).pass);
}

TEST_CASE("ball and ellipsoid cores have exact Hessians away from 0") {
    Rng rng(84);
    Smoothing sm;
    const SupportField ball = smooth_support(Ball{random_vec(rng, 0.4), 2.0}, sm);
    // det(d^2 (r|x|)) is (-2)-homogeneous and radial: value 56 r^2... for
    // radius factor rho: Hessian of |x| at unit point has det 56; scaling by
    // body radius 2 multiplies entries by 2.
    Vec16 u = Vec16::Zero();
    u[0] = 1.0;
    const HMatrix2 h = octonionic_hessian(ball.core, u);
    CHECK(det(h) == doctest::Approx(56.0 * 4.0).epsilon(1e-10));
    const HMatrix2 h2 = octonionic_hessian(ball.core, Vec16(0.5 * u));
    CHECK(det(h2) == doctest::Approx(56.0 * 4.0 / 0.25).epsilon(1e-10));

    // FD agrees with the analytic callback.
    ScalarField fd;
    fd.eval = ball.core.eval;
    fd.hint = ScalarField::Smoothness::Smooth;
    const Vec16 pt = random_vec(rng, 0.6) + Vec16::Ones() * 0.3;
    CHECK(max_abs_diff(octonionic_hessian(fd, pt), octonionic_hessian(ball.core, pt)) <= 1e-4);

    Mat16 r = Mat16::Random();
    const Mat16 shape = Mat16(r.transpose() * r) + 0.4 * Mat16::Identity();
    const SupportField ell = smooth_support(Ellipsoid{Vec16::Zero(), shape}, sm);
    ScalarField efd;
    efd.eval = ell.core.eval;
    efd.hint = ScalarField::Smoothness::Smooth;
    CHECK(max_abs_diff(octonionic_hessian(efd, pt), octonionic_hessian(ell.core, pt)) <= 1e-4);
}

TEST_CASE("psi_valuation: singleton, translation, scaling") {
    Smoothing sm;
    const TestFunction psi = TestFunction::bump_in_box(Box::centered_cube(0.8));
    const std::int64_t n = 1 << 12;

    Rng rng(85);
    const Vec16 p = random_vec(rng, 0.5);
    CHECK(psi_valuation(Polytope{{p}}, psi, sm, n, 7).value == 0.0);

    // Translation invariance, bitwise, with dyadic data.
    Polytope sq = square(0, -0.5, 0.75, 8, -0.25, 0.5);
    Vec16 t = Vec16::Zero();
    t[0] = 0.5;
    t[3] = -0.25;
    t[9] = 1.0;
    const ValuationResult base = psi_valuation(sq, psi, sm, n, 7);
    const ValuationResult moved = psi_valuation(translate_body(sq, t), psi, sm, n, 7);
    CHECK(base.value == moved.value);
    CHECK(base.std_error == moved.std_error);

    // 2-homogeneity, bitwise: scale the body by 2 and halve beta.
    Smoothing half = sm;
    half.beta = sm.beta / 2.0;
    ConvexBody doubled = transform_body(Mat16(2.0 * Mat16::Identity()), sq);
    const ValuationResult big = psi_valuation(doubled, psi, half, n, 7);
    CHECK(big.value == 4.0 * base.value);

    // Balls: no smoothing parameter, straight bitwise homogeneity.
    const Ball ballK{Vec16::Zero(), 0.75};
    const ValuationResult vb = psi_valuation(ballK, psi, sm, n, 9);
    const ValuationResult vb2 = psi_valuation(Ball{Vec16::Zero(), 1.5}, psi, sm, n, 9);
    CHECK(vb2.value == 4.0 * vb.value);
}

TEST_CASE("pseudo_volume of the unit ball matches the radial oracle") {
    Smoothing sm;
    const Ball unit{Vec16::Zero(), 1.0};
    const ValuationResult pv = pseudo_volume(unit, sm, 1 << 14, 11);

    // Radial oracle: det(d^2 |x|) = c0 / r^2 with c0 from an FD Hessian at
    // (1, 0, ..., 0); P = c0 * omega15 / 14.
    ScalarField habs;
    habs.eval = [](const Vec16& x) { return x.norm(); };
    habs.hint = ScalarField::Smoothness::Smooth;
    Vec16 e0 = Vec16::Zero();
    e0[0] = 1.0;
    const double c0 = det(octonionic_hessian(habs, e0));
    CHECK(c0 == doctest::Approx(56.0).epsilon(1e-4));
    const double oracle = c0 * sphere15_area() / 14.0;
    CHECK(std::abs(pv.value - oracle) <= 3.0 * pv.std_error);

    // Translation invariance and 2-homogeneity, bitwise.
    Vec16 t = Vec16::Zero();
    t[5] = 2.5;
    CHECK(pseudo_volume(Ball{t, 1.0}, sm, 1 << 12, 13).value ==
          pseudo_volume(unit, sm, 1 << 12, 13).value);
    CHECK(pseudo_volume(Ball{t, 2.0}, sm, 1 << 12, 13).value ==
          4.0 * pseudo_volume(unit, sm, 1 << 12, 13).value);
}

TEST_CASE("pseudo_volume is Spin(9)-invariant on an off-center ellipsoid") {
    Mat16 shape = Mat16::Identity();
    for (int i = 0; i < 8; ++i) shape(i, i) = 2.25;
    Vec16 c = Vec16::Zero();
    c[2] = 0.4;
    const ConvexBody body = Ellipsoid{c, shape};

    Smoothing sm;
    const std::int64_t n = 1 << 13;
    const ValuationResult base = pseudo_volume(body, sm, n, 17);
    Rng rng(86);
    const auto& ctx = SpinContext::instance();
    for (int k = 0; k < 3; ++k) {
        const GroupElement g = ctx.sample_spin9(rng);
        const ValuationResult moved = pseudo_volume(transform_body(g.g16, body), sm, n, 17);
        CHECK(std::abs(moved.value - base.value) <=
              3.0 * (moved.std_error + base.std_error));
    }
}

TEST_CASE("additivity residual on equal, nested, and overlapping boxes") {
    Smoothing sm;
    sm.beta = 128.0;
    sm.chi_level = 32.0;
    const TestFunction psi = TestFunction::bump_in_box(Box::centered_cube(0.8));
    const std::int64_t n = 1 << 12;

    const ConvexBody a = square(0, -0.5, 0.5, 8, -0.5, 0.5);
    const MeasureEstimate same = additivity_residual(a, a, psi, sm, n, 19);
    CHECK(same.value == 0.0);

    // Nested: K1 inside K2 on the differing axis.
    const ConvexBody inner = square(0, -0.25, 0.25, 8, -0.5, 0.5);
    const MeasureEstimate nested = additivity_residual(inner, a, psi, sm, n, 19);
    CHECK(std::abs(nested.value) <= 3.0 * nested.std_error + 2e-2);

    // Overlapping squares sharing the second extent, different widths so
    // the smoothed supports do not differ by a linear function.
    const ConvexBody left = square(0, -0.6, 0.1, 8, -0.5, 0.5);
    const ConvexBody right = square(0, -0.1, 0.35, 8, -0.5, 0.5);
    const MeasureEstimate ov = additivity_residual(left, right, psi, sm, n, 19);
    CHECK(std::abs(ov.value) <= 3.0 * ov.std_error + 2e-2);

    // Union convexity preconditions.
    const ConvexBody off = square(0, -0.1, 0.6, 8, -0.4, 0.6); // differs on two axes
    CHECK_THROWS_AS((void)additivity_residual(left, off, psi, sm, 64, 19), std::domain_error);
    const ConvexBody apart = square(0, 0.3, 0.6, 8, -0.5, 0.5);
    CHECK_THROWS_AS((void)additivity_residual(inner, apart, psi, sm, 64, 19), std::domain_error);
    CHECK_THROWS_AS(
        (void)additivity_residual(Ball{Vec16::Zero(), 1.0}, a, psi, sm, 64, 19),
        std::domain_error);
}

TEST_CASE("t_valuation") {
    const Ball ball{Vec16::Zero(), 1.3};
    const ValuationResult t0 = t_valuation(ball, 0, 100, 3);
    CHECK(t0.value == 1.0);
    CHECK(t0.std_error == 0.0);

    const ValuationResult t8 = t_valuation(ball, 8, 100, 3);
    CHECK(t8.value ==
          doctest::Approx(unit_ball_volume(8) * std::pow(1.3, 8.0)).epsilon(1e-12));
    CHECK(t8.std_error == 0.0);
    CHECK(unit_ball_volume(8) == doctest::Approx(std::pow(kPi, 4.0) / 24.0).epsilon(1e-14));

    // Ellipsoid T8 against the Gram-restriction oracle with another seed.
    Mat16 shape = Mat16::Identity();
    for (int i = 0; i < 4; ++i) shape(i, i) = 3.0;
    shape(0, 9) = shape(9, 0) = 0.4;
    const ConvexBody ell = Ellipsoid{Vec16::Zero(), shape};
    const ValuationResult te = t_valuation(ell, 8, 4000, 5);
    const ValuationResult oracle = t_valuation(ell, 8, 20000, 1234);
    CHECK(std::abs(te.value - oracle.value) <= 3.0 * (te.std_error + oracle.std_error));

    CHECK_THROWS_AS((void)t_valuation(ell, 4, 10, 3), CapabilityError);
    CHECK_THROWS_AS((void)t_valuation(ConvexBody(square(0, 0, 1, 8, 0, 1)), 8, 10, 3),
                    CapabilityError);
    CHECK_THROWS_AS((void)t_valuation(ball, 9, 10, 3), CapabilityError);
}

TEST_CASE("u_valuation quadrature identities and MC cross-check") {
    const double r = 1.1;
    const Ball ball{Vec16::Zero(), r};
    const double kappa16 = std::pow(kPi, 8.0) / 40320.0;
    CHECK(u_valuation_quadrature(ball, 16) ==
          doctest::Approx(kappa16 * std::pow(r, 16.0)).epsilon(1e-12));
    CHECK(u_valuation_quadrature(ball, 8) ==
          doctest::Approx(unit_ball_volume(8) * std::pow(r, 8.0)).epsilon(1e-12));

    for (int j : {8, 12, 16}) {
        const ValuationResult mc = u_valuation(ball, j, 1 << 15, 7);
        CHECK(std::abs(mc.value - u_valuation_quadrature(ball, j)) <= 3.0 * mc.std_error);
    }
    CHECK_THROWS_AS((void)u_valuation(ConvexBody(Ellipsoid{}), 16, 10, 3), CapabilityError);
    CHECK_THROWS_AS((void)u_valuation(ball, 7, 10, 3), CapabilityError);
}

TEST_CASE("mollified support path tracks the true support of a polytope") {
    Smoothing sm;
    sm.kind = Smoothing::Kind::Mollify;
    sm.mollify_n = 16;
    sm.mollify_points = 512;
    const ConvexBody sq = square(0, -0.5, 0.5, 8, -0.25, 0.75);
    const SupportField sf = smooth_support(sq, sm);
    CHECK(sf.core.hint == ScalarField::Smoothness::Smooth);
    Rng rng(88);
    for (int k = 0; k < 100; ++k) {
        const Vec16 x = random_vec(rng, 1.0);
        // Mollification shifts the max by at most max|vertex| / n.
        CHECK(std::abs(sf.full(x) - support(sq, x)) <= 1.1 / 16.0);
    }
}

TEST_CASE("valuation result JSON payload") {
    ValuationResult r;
    r.value = 2.5;
    r.std_error = 0.125;
    r.n_samples = 1024;
    r.seed = 7;
    r.smoothing = "lse(beta=128)";
    const std::string text = result_to_json_text(r);
    CHECK(text.find("\"value\":2.5") != std::string::npos);
    CHECK(text.find("\"std_error\":0.125") != std::string::npos);
    CHECK(text.find("\"n_samples\":1024") != std::string::npos);
    CHECK(text.find("\"seed\":7") != std::string::npos);
    CHECK(text.find("lse(beta=128)") != std::string::npos);
}

TEST_CASE("body JSON round trip and validation") {
    Rng rng(87);
    const ConvexBody ball = Ball{random_vec(rng, 1.0), 2.5};
    const ConvexBody back = body_from_json_text(body_to_json_text(ball));
    CHECK(std::get<Ball>(back).radius == 2.5);
    CHECK((std::get<Ball>(back).center - std::get<Ball>(ball).center).cwiseAbs().maxCoeff() ==
          0.0);

    Mat16 m = Mat16::Random();
    const ConvexBody ell = Ellipsoid{random_vec(rng, 1.0), Mat16(m.transpose() * m + 0.5 * Mat16::Identity())};
    const ConvexBody eback = body_from_json_text(body_to_json_text(ell));
    CHECK((std::get<Ellipsoid>(eback).shape - std::get<Ellipsoid>(ell).shape)
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    const ConvexBody poly = ConvexBody(square(0, -1, 1, 8, -1, 1));
    const ConvexBody pback = body_from_json_text(body_to_json_text(poly));
    CHECK(std::get<Polytope>(pback).vertices.size() == 4);

    CHECK_THROWS_AS((void)body_from_json_text("{\"type\":\"cone\"}"), std::invalid_argument);
    CHECK_THROWS_AS((void)body_from_json_text("{"), std::invalid_argument);
    CHECK_THROWS_AS(
        (void)body_from_json_text("{\"type\":\"ball\",\"center\":[0,0],\"radius\":1}"),
        std::invalid_argument);
}
