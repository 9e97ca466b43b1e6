#include <doctest.h>

#include "octoval/octonion.hpp"
#include "octoval/rng.hpp"

using namespace octoval;

namespace {

Octonion e(int i) { return Octonion::unit(i); }

bool approx_eq(const Octonion& a, const Octonion& b, double tol) {
    for (int i = 0; i < 8; ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

// Expected imaginary-part table, row i times column j, exactly as printed.
// Stored independently of the production table (sign, index).
constexpr int sgn[7][7] = {
    {-1, +1, +1, -1, +1, -1, -1},
    {-1, -1, +1, +1, -1, +1, -1},
    {-1, -1, -1, +1, +1, -1, +1},
    {+1, -1, -1, -1, +1, +1, -1},
    {-1, +1, -1, -1, -1, +1, +1},
    {+1, -1, +1, -1, -1, -1, +1},
    {+1, +1, -1, +1, -1, -1, -1},
};
constexpr int idx[7][7] = {
    {0, 4, 7, 2, 6, 5, 3},
    {4, 0, 5, 1, 3, 7, 6},
    {7, 5, 0, 6, 2, 4, 1},
    {2, 1, 6, 0, 7, 3, 5},
    {6, 3, 2, 7, 0, 1, 4},
    {5, 7, 4, 3, 1, 0, 2},
    {3, 6, 1, 5, 4, 2, 0},
};

} // namespace

TEST_CASE("multiplication table matches all 49 imaginary basis products") {
    for (int i = 1; i <= 7; ++i) {
        for (int j = 1; j <= 7; ++j) {
            const Octonion p = e(i) * e(j);
            Octonion expect;
            expect[idx[i - 1][j - 1]] = double(sgn[i - 1][j - 1]);
            CAPTURE(i);
            CAPTURE(j);
            CHECK(approx_eq(p, expect, 0.0));
        }
    }
}

TEST_CASE("basis examples from the table") {
    CHECK(approx_eq(e(1) * e(2), e(4), 0.0));
    CHECK(approx_eq(e(2) * e(1), -e(4), 0.0));
}

TEST_CASE("e0 is a two-sided identity and e_i^2 = -1") {
    Rng rng(11);
    for (int t = 0; t < 32; ++t) {
        const Octonion q = random_octonion(rng);
        CHECK(approx_eq(e(0) * q, q, 0.0));
        CHECK(approx_eq(q * e(0), q, 0.0));
    }
    for (int i = 1; i < 8; ++i) CHECK(approx_eq(e(i) * e(i), -e(0), 0.0));
}

TEST_CASE("conjugation is an anti-involution") {
    Rng rng(12);
    CHECK(approx_eq(conj(Octonion(1.0) + e(1)), Octonion(1.0) - e(1), 0.0));
    for (int t = 0; t < 10000; ++t) {
        const Octonion a = random_octonion(rng);
        const Octonion b = random_octonion(rng);
        CHECK(approx_eq(conj(conj(a)), a, 0.0));
        CHECK(approx_eq(conj(a * b), conj(b) * conj(a), 1e-12));
    }
}

TEST_CASE("conj of a basis product composes through the table") {
    // conj(e1 e2) = conj(e4) = -e4, and conj(e2) conj(e1) = e2 e1 = -e4.
    CHECK(approx_eq(conj(e(1) * e(2)), -e(4), 0.0));
    CHECK(approx_eq(conj(e(2)) * conj(e(1)), -e(4), 0.0));
}

TEST_CASE("norm is multiplicative") {
    Rng rng(13);
    Octonion x;
    x[0] = 3.0;
    x[2] = 4.0;
    CHECK(norm(x) == doctest::Approx(5.0).epsilon(1e-14));
    for (int i = 0; i < 8; ++i) CHECK(norm(e(i)) == 1.0);
    for (int t = 0; t < 10000; ++t) {
        const Octonion a = random_octonion(rng);
        const Octonion b = random_octonion(rng);
        const double lhs = norm(a * b);
        const double rhs = norm(a) * norm(b);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + rhs));
    }
}

TEST_CASE("inverse") {
    CHECK(approx_eq(inverse(e(1)), -e(1), 0.0));
    CHECK(approx_eq(inverse(Octonion(2.0)), Octonion(0.5), 0.0));
    Rng rng(14);
    for (int t = 0; t < 100; ++t) {
        Octonion q = random_octonion(rng);
        if (norm(q) < 1e-3) continue;
        CHECK(approx_eq(q * inverse(q), Octonion(1.0), 1e-12));
        CHECK(approx_eq(inverse(q) * q, Octonion(1.0), 1e-12));
    }
    CHECK_THROWS_AS((void)inverse(Octonion()), std::domain_error);
}

TEST_CASE("associator: table example, alternating, central identity") {
    CHECK(approx_eq(associator(e(1), e(2), e(3)), -2.0 * e(6), 0.0));
    Rng rng(15);
    for (int t = 0; t < 200; ++t) {
        const Octonion q = random_octonion(rng);
        const Octonion r = random_octonion(rng);
        const Octonion s = random_octonion(rng);
        CHECK(norm(associator(q, q, r)) <= 1e-12);
        CHECK(norm(associator(q, r, q)) <= 1e-12);
        CHECK(norm(associator(r, q, q)) <= 1e-12);
        CHECK(norm(associator(Octonion(1.0), q, r)) <= 1e-12);
        // Alternating: swapping two arguments flips the sign.
        CHECK(approx_eq(associator(q, r, s), -associator(r, q, s), 1e-12));
        CHECK(approx_eq(associator(q, r, s), -associator(q, s, r), 1e-12));
        // Conjugating any single argument flips the sign.
        CHECK(approx_eq(associator(conj(q), r, s), -associator(q, r, s), 1e-12));
        CHECK(approx_eq(associator(q, conj(r), s), -associator(q, r, s), 1e-12));
        CHECK(approx_eq(associator(q, r, conj(s)), -associator(q, r, s), 1e-12));
    }
}

TEST_CASE("weak associativity identities") {
    Rng rng(16);
    for (int t = 0; t < 10000; ++t) {
        const Octonion a = random_octonion(rng);
        const Octonion b = random_octonion(rng);
        const Octonion c = random_octonion(rng);
        // (i) Re((ab)c) = Re(a(bc))
        CHECK(std::abs(re((a * b) * c) - re(a * (b * c))) <= 1e-12);
        // (ii) a(bc) + conj(b)(conj(a)c) = (ab + conj(b)conj(a))c
        const Octonion lhs2 = a * (b * c) + conj(b) * (conj(a) * c);
        const Octonion rhs2 = (a * b + conj(b) * conj(a)) * c;
        CHECK(approx_eq(lhs2, rhs2, 1e-12));
        // (iii), the conjugate of (ii): (ca)b + (c conj(b))conj(a) = c(ab + conj(b)conj(a))
        const Octonion lhs3 = (c * a) * b + (c * conj(b)) * conj(a);
        const Octonion rhs3 = c * (a * b + conj(b) * conj(a));
        CHECK(approx_eq(lhs3, rhs3, 1e-12));
        // (v) Re((conj(a)b)(ca)) = |a|^2 Re(bc)
        CHECK(std::abs(re((conj(a) * b) * (c * a)) - norm_sq(a) * re(b * c)) <= 1e-12 * (1.0 + norm_sq(a)));
    }
}

TEST_CASE("quaternion pair representation multiplies like (xw - conj(z)y) + (zx + y conj(w))l") {
    // Embedding: i = e1, j = e2, k = ij = e4, l = e3 orthogonal to {1,i,j,k}.
    Rng rng(17);
    const int quat_idx[4] = {0, 1, 2, 4};
    auto embed = [&](const std::array<double, 4>& h) {
        Octonion q;
        for (int s = 0; s < 4; ++s) q[quat_idx[s]] = h[std::size_t(s)];
        return q;
    };
    auto random_quat = [&]() {
        std::array<double, 4> h;
        for (auto& v : h) v = rng.uniform(-1.0, 1.0);
        return embed(h);
    };
    const Octonion l = e(3);
    for (int t = 0; t < 2000; ++t) {
        const Octonion x = random_quat();
        const Octonion y = random_quat();
        const Octonion w = random_quat();
        const Octonion z = random_quat();
        const Octonion lhs = (x + y * l) * (w + z * l);
        const Octonion rhs = (x * w - conj(z) * y) + (z * x + y * conj(w)) * l;
        CHECK(approx_eq(lhs, rhs, 1e-12));
    }
}

TEST_CASE("scalar product is the Euclidean dot product and positive definite") {
    Rng rng(18);
    for (int t = 0; t < 1000; ++t) {
        const Octonion x = random_octonion(rng);
        const Octonion y = random_octonion(rng);
        CHECK(std::abs(inner(x, y) - re(x * conj(y))) <= 1e-13);
        CHECK(std::abs(inner(x, y) - inner(y, x)) <= 1e-13);
        CHECK(inner(x, x) >= 0.0);
        CHECK(std::abs(inner(x, x) - norm_sq(x)) <= 1e-13);
    }
}
