#include <doctest.h>

#include "octoval/fields.hpp"

#include <fstream>

using namespace octoval;

namespace {

void check_derivatives(const ScalarField& f, const Vec16& p, double tol) {
    REQUIRE(bool(f.grad));
    REQUIRE(bool(f.hess));
    const double h = 1e-5 * (1.0 + p.norm());
    const Vec16 g = f.grad(p);
    const Mat16 m = f.hess(p);
    for (int i = 0; i < 16; ++i) {
        Vec16 a = p, b = p;
        a[i] += h;
        b[i] -= h;
        CHECK(std::abs((f(a) - f(b)) / (2 * h) - g[i]) <= tol);
        CHECK(std::abs((f(a) - 2 * f(p) + f(b)) / (h * h) - m(i, i)) <= tol * 2e3);
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = 8; j < 12; ++j) {
            Vec16 pp = p, pm = p, mp = p, mm = p;
            pp[i] += h;
            pp[j] += h;
            pm[i] += h;
            pm[j] -= h;
            mp[i] -= h;
            mp[j] += h;
            mm[i] -= h;
            mm[j] -= h;
            const double fd = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
            CHECK(std::abs(fd - m(i, j)) <= tol * 2e3);
        }
    }
}

} // namespace

TEST_CASE("built-in field values") {
    Vec16 p = Vec16::Zero();
    p[0] = 1.0;
    p[8] = 2.0;
    CHECK(fields::normsq()(p) == 5.0);
    CHECK(fields::normsq1()(p) == 1.0);
    CHECK(fields::re_q1_conj_q2()(p) == 2.0);
    CHECK(fields::abs_norm()(p) == doctest::Approx(std::sqrt(5.0)));
    CHECK(fields::gaussian(1.0)(Vec16::Zero()) == 1.0);
}

TEST_CASE("analytic derivatives of the builders match finite differences") {
    Rng rng(71);
    Vec16 p;
    for (int i = 0; i < 16; ++i) p[i] = rng.uniform(-0.6, 0.6);
    check_derivatives(fields::normsq(), p, 1e-7);
    check_derivatives(fields::gaussian(1.3), p, 1e-7);
    check_derivatives(fields::gaussian_at(p * 0.3, 0.8), p, 1e-7);
    check_derivatives(fields::ball_bump(Vec16::Zero(), 1.4, 4, 2.0), p, 1e-6);
    check_derivatives(fields::smooth_box_bump(Box::centered_cube(0.9), 1.5), p * 0.9, 2e-6);
    const ScalarField cm =
        fields::chi_max(fields::normsq(), fields::quadform(Mat16(0.7 * Mat16::Identity())), 4.0);
    check_derivatives(cm, p, 1e-6);
}

TEST_CASE("smooth_box_bump support and plateau") {
    const Box box = Box::centered_cube(1.0);
    const ScalarField f = fields::smooth_box_bump(box, 2.0);
    CHECK(f(Vec16::Zero()) == 2.0);
    CHECK(f(Vec16::Ones() * 0.45) == 2.0); // inside the plateau
    Vec16 outside = Vec16::Zero();
    outside[5] = 1.0001;
    CHECK(f(outside) == 0.0);
    Vec16 edge = Vec16::Zero();
    edge[5] = 0.999;
    CHECK(f(edge) > 0.0);
    CHECK(f(edge) < 2e-4 * 2.0 + 1e-12);
}

TEST_CASE("poly_bump support box is tight") {
    Rng rng(72);
    Mat16 r = Mat16::Random();
    const Mat16 shape = Mat16(r.transpose() * r) + 0.5 * Mat16::Identity();
    const ScalarField f = fields::poly_bump(Vec16::Zero(), shape, 4, 1.0);
    REQUIRE(f.support.has_value());
    for (int t = 0; t < 200; ++t) {
        Vec16 p;
        for (int i = 0; i < 16; ++i) p[i] = rng.uniform(-3.0, 3.0);
        if (f(p) != 0.0) CHECK(f.support->contains(p, 1e-12));
    }
}

TEST_CASE("field mini-language") {
    const ScalarField f = fields::parse("normsq + 2 * normsq1");
    Vec16 p = Vec16::Zero();
    p[1] = 1.0;
    p[9] = 3.0;
    CHECK(f(p) == doctest::Approx(10.0 + 2.0).epsilon(1e-14));

    const ScalarField g = fields::parse("gaussian(2.0)");
    CHECK(g(p) == doctest::Approx(std::exp(-10.0 / 8.0)).epsilon(1e-12));

    CHECK(fields::parse("re-q1-conj-q2")(p) == 3.0);
    CHECK(fields::parse("abs")(p) == doctest::Approx(std::sqrt(10.0)));
    CHECK(fields::parse(" 0.5 * normsq + -1 * normsq1 ")(p) == doctest::Approx(4.0));

    CHECK_THROWS_AS((void)fields::parse("bogus"), std::invalid_argument);
    CHECK_THROWS_AS((void)fields::parse("normsq +"), std::invalid_argument);
    CHECK_THROWS_AS((void)fields::parse("quadform(/nonexistent.json)"), std::invalid_argument);

    // quadform from a JSON file.
    const std::string path = "/tmp/octoval_test_quadform.json";
    {
        std::ofstream out(path);
        out << "[";
        for (int i = 0; i < 16; ++i) {
            out << (i ? "," : "") << "[";
            for (int j = 0; j < 16; ++j) out << (j ? "," : "") << (i == j ? 1.0 : 0.0);
            out << "]";
        }
        out << "]";
    }
    const ScalarField q = fields::parse("quadform(" + path + ")");
    CHECK(q(p) == doctest::Approx(10.0));
}
