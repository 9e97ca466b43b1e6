#pragma once

#include "octoval/calculus.hpp"

#include <string>

namespace octoval {
namespace fields {

/// |q|^2 on O^2 (full squared norm of the 16 coordinates).
ScalarField normsq();

/// |q_1|^2 (first octonionic coordinate only).
ScalarField normsq1();

/// Re(q_1 conj(q_2)) = sum_l x_l y_l.
ScalarField re_q1_conj_q2();

/// Euclidean norm |x|; continuous, not differentiable at 0.
ScalarField abs_norm();

/// exp(-|x|^2 / (2 scale^2)).
ScalarField gaussian(double scale = 1.0);

/// exp(-|x - mu|^2 / (2 scale^2)).
ScalarField gaussian_at(const Vec16& mu, double scale = 1.0);

/// Quadratic form x^T B x (B symmetric); exact Hessian 2B.
ScalarField quadform(const Mat16& b);

/// <v, x> + c.
ScalarField linear(const Vec16& v, double c = 0.0);

/// amplitude * (1 - (x-c)^T S (x-c))_+^power, S positive definite.
/// Smooth of class C^{power-1}, compactly supported, analytic derivatives.
ScalarField poly_bump(const Vec16& center, const Mat16& shape, int power, double amplitude);

/// Isotropic bump of the given radius.
ScalarField ball_bump(const Vec16& center, double radius, int power = 4, double amplitude = 1.0);

/// C^2 product bump filling a box: per coordinate it is 1 on the central
/// plateau fraction and descends to 0 at the box faces through the quintic
/// smoothstep. Unlike a radial bump, its mass does not collapse relative to
/// the box volume in 16 dimensions, so box-uniform sampling stays efficient.
ScalarField smooth_box_bump(const Box& box, double amplitude = 1.0, double plateau = 0.5);

ScalarField sum(const ScalarField& f, const ScalarField& g);
ScalarField scaled(double s, const ScalarField& f);

/// Pointwise max; merely continuous, with almost-everywhere derivative
/// callbacks following the active branch.
ScalarField pointwise_max(const ScalarField& f, const ScalarField& g);

/// x -> f(A x + b) with chain-rule derivatives when f carries them.
ScalarField compose_linear(const ScalarField& f, const Mat16& a, const Vec16& b);

/// Smooth max via the chi approximant: g + chi(j(f-g))/j.
ScalarField chi_max(const ScalarField& f, const ScalarField& g, double level);

/// Random polynomial of degree 4 with bounded coefficients; no analytic
/// derivative callbacks, so FD paths are exercised.
ScalarField random_quartic(Rng& rng);

/// Parse the CLI field mini-language: named builtins, gaussian(s),
/// quadform(path-to-16x16-json), combined with '+' and scalar '*'.
/// Throws std::invalid_argument on malformed input.
ScalarField parse(const std::string& spec);

} // namespace fields

/// C^2 ramp: 0 for x <= -1, x for x >= 1, convex transition with
/// 0 <= chi' <= 1 and chi'' >= 0; chi' is the quintic smoothstep.
double chi(double x);
double chi_prime(double x);
double chi_second(double x);

} // namespace octoval
