#pragma once

#include "octoval/common.hpp"
#include "octoval/rng.hpp"

#include <array>
#include <cmath>
#include <iosfwd>

namespace octoval {

/// Octonion in the basis e0..e7, coefficient of e_i stored at index i.
/// e0 is the real unit; the imaginary units anti-commute and square to -1.
struct Octonion {
    std::array<double, 8> c{};

    Octonion() = default;
    explicit Octonion(double real) { c[0] = real; }

    static Octonion unit(int i) {
        Octonion q;
        q.c[std::size_t(i)] = 1.0;
        return q;
    }

    double& operator[](int i) { return c[std::size_t(i)]; }
    double operator[](int i) const { return c[std::size_t(i)]; }

    Octonion& operator+=(const Octonion& o) {
        for (int i = 0; i < 8; ++i) c[std::size_t(i)] += o.c[std::size_t(i)];
        return *this;
    }
    Octonion& operator-=(const Octonion& o) {
        for (int i = 0; i < 8; ++i) c[std::size_t(i)] -= o.c[std::size_t(i)];
        return *this;
    }
    Octonion& operator*=(double s) {
        for (auto& x : c) x *= s;
        return *this;
    }

    Eigen::Matrix<double, 8, 1> coeffs() const {
        Eigen::Matrix<double, 8, 1> v;
        for (int i = 0; i < 8; ++i) v[i] = c[std::size_t(i)];
        return v;
    }
    static Octonion from_coeffs(const Eigen::Matrix<double, 8, 1>& v) {
        Octonion q;
        for (int i = 0; i < 8; ++i) q.c[std::size_t(i)] = v[i];
        return q;
    }
};

inline Octonion operator+(Octonion a, const Octonion& b) { return a += b; }
inline Octonion operator-(Octonion a, const Octonion& b) { return a -= b; }
inline Octonion operator-(const Octonion& a) {
    Octonion r;
    for (int i = 0; i < 8; ++i) r[i] = -a[i];
    return r;
}
inline Octonion operator*(Octonion a, double s) { return a *= s; }
inline Octonion operator*(double s, Octonion a) { return a *= s; }
inline Octonion operator/(Octonion a, double s) { return a *= (1.0 / s); }

/// Signed basis product: e_i * e_j = sign * e_index.
struct BasisProduct {
    int sign;
    int index;
    constexpr bool operator==(const BasisProduct&) const = default;
};

using BasisTable = std::array<std::array<BasisProduct, 8>, 8>;

/// Basis product table transcribed entry by entry; a build-time assertion
/// in octonion.cpp re-derives it from the Fano triples so a transcription
/// slip cannot survive compilation.
const BasisTable& basis_table();

Octonion mul(const Octonion& a, const Octonion& b);
inline Octonion operator*(const Octonion& a, const Octonion& b) { return mul(a, b); }

inline double re(const Octonion& a) { return a[0]; }

inline Octonion conj(const Octonion& a) {
    Octonion r = -a;
    r[0] = a[0];
    return r;
}

inline double norm_sq(const Octonion& a) {
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += a[i] * a[i];
    return s;
}

inline double norm(const Octonion& a) { return std::sqrt(norm_sq(a)); }

/// Euclidean scalar product <a,b> = Re(a * conj(b)).
inline double inner(const Octonion& a, const Octonion& b) {
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += a[i] * b[i];
    return s;
}

Octonion inverse(const Octonion& a);

/// [a,b,c] = (ab)c - a(bc); alternating, vanishes on any associative triple.
Octonion associator(const Octonion& a, const Octonion& b, const Octonion& c);

/// Matrix of x -> q*x on coefficient vectors. Its transpose is the matrix
/// of x -> conj(q)*x.
Eigen::Matrix<double, 8, 8> left_mult_matrix(const Octonion& q);

/// Coefficients i.i.d. uniform on [-1, 1].
inline Octonion random_octonion(Rng& rng) {
    Octonion q;
    for (int i = 0; i < 8; ++i) q[i] = rng.uniform(-1.0, 1.0);
    return q;
}

std::ostream& operator<<(std::ostream& os, const Octonion& q);

} // namespace octoval
