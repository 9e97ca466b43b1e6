#include "octoval/octonion.hpp"

#include <ostream>
#include <stdexcept>

namespace octoval {
namespace {

// Row = first factor, column = second factor, indices 1..7. The imaginary
// part of the table; identity row/column and diagonal follow from
// e0 = 1 and e_i^2 = -1.
constexpr BasisProduct P(int s, int k) { return BasisProduct{s, k}; }

constexpr std::array<std::array<BasisProduct, 7>, 7> kImaginaryTable = {{
    {P(-1, 0), P(+1, 4), P(+1, 7), P(-1, 2), P(+1, 6), P(-1, 5), P(-1, 3)},
    {P(-1, 4), P(-1, 0), P(+1, 5), P(+1, 1), P(-1, 3), P(+1, 7), P(-1, 6)},
    {P(-1, 7), P(-1, 5), P(-1, 0), P(+1, 6), P(+1, 2), P(-1, 4), P(+1, 1)},
    {P(+1, 2), P(-1, 1), P(-1, 6), P(-1, 0), P(+1, 7), P(+1, 3), P(-1, 5)},
    {P(-1, 6), P(+1, 3), P(-1, 2), P(-1, 7), P(-1, 0), P(+1, 1), P(+1, 4)},
    {P(+1, 5), P(-1, 7), P(+1, 4), P(-1, 3), P(-1, 1), P(-1, 0), P(+1, 2)},
    {P(+1, 3), P(+1, 6), P(-1, 1), P(+1, 5), P(-1, 4), P(-1, 2), P(-1, 0)},
}};

constexpr BasisTable make_transcribed_table() {
    BasisTable t{};
    for (int j = 0; j < 8; ++j) t[0][std::size_t(j)] = P(+1, j);
    for (int i = 1; i < 8; ++i) {
        t[std::size_t(i)][0] = P(+1, i);
        for (int j = 1; j < 8; ++j)
            t[std::size_t(i)][std::size_t(j)] = kImaginaryTable[std::size_t(i - 1)][std::size_t(j - 1)];
    }
    return t;
}

// Fano lines, cyclically oriented: e_i e_j = e_k for consecutive (i,j,k).
constexpr std::array<std::array<int, 3>, 7> kFanoTriples = {{
    {1, 2, 4}, {1, 3, 7}, {1, 5, 6}, {2, 3, 5}, {2, 6, 7}, {3, 4, 6}, {4, 5, 7},
}};

constexpr BasisTable make_fano_table() {
    BasisTable t{};
    for (int j = 0; j < 8; ++j) t[0][std::size_t(j)] = P(+1, j);
    for (int i = 1; i < 8; ++i) {
        t[std::size_t(i)][0] = P(+1, i);
        t[std::size_t(i)][std::size_t(i)] = P(-1, 0);
    }
    for (const auto& line : kFanoTriples) {
        for (int r = 0; r < 3; ++r) {
            const int a = line[std::size_t(r)];
            const int b = line[std::size_t((r + 1) % 3)];
            const int k = line[std::size_t((r + 2) % 3)];
            t[std::size_t(a)][std::size_t(b)] = P(+1, k);
            t[std::size_t(b)][std::size_t(a)] = P(-1, k);
        }
    }
    return t;
}

constexpr BasisTable kTable = make_transcribed_table();
static_assert(kTable == make_fano_table(),
              "transcribed basis table disagrees with the Fano-plane derivation");

} // namespace

const BasisTable& basis_table() { return kTable; }

Octonion mul(const Octonion& a, const Octonion& b) {
    Octonion r;
    for (int i = 0; i < 8; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        for (int j = 0; j < 8; ++j) {
            const auto [sign, k] = kTable[std::size_t(i)][std::size_t(j)];
            r[k] += double(sign) * ai * b[j];
        }
    }
    return r;
}

Octonion inverse(const Octonion& a) {
    const double n2 = norm_sq(a);
    if (n2 == 0.0) throw std::domain_error("zero octonion has no inverse");
    return conj(a) / n2;
}

Octonion associator(const Octonion& a, const Octonion& b, const Octonion& c) {
    return mul(mul(a, b), c) - mul(a, mul(b, c));
}

Eigen::Matrix<double, 8, 8> left_mult_matrix(const Octonion& q) {
    Eigen::Matrix<double, 8, 8> m;
    for (int j = 0; j < 8; ++j) {
        const Octonion col = mul(q, Octonion::unit(j));
        for (int i = 0; i < 8; ++i) m(i, j) = col[i];
    }
    return m;
}

std::ostream& operator<<(std::ostream& os, const Octonion& q) {
    os << q[0];
    for (int i = 1; i < 8; ++i) {
        os << (q[i] < 0 ? " - " : " + ") << std::abs(q[i]) << "*e" << i;
    }
    return os;
}

} // namespace octoval
