#pragma once

#include "octoval/calculus.hpp"

#include <vector>

namespace octoval {

/// Real-valued function of an affine octonionic line.
struct LineFunction {
    std::function<double(const AffineLine&)> eval;
    double operator()(const AffineLine& line) const { return eval(line); }
};

struct RadonEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
};

/// Distance from the origin to the affine line (norm of the base point's
/// projection onto the line's normal space).
double line_distance_to_origin(const AffineLine& line);

/// Importance proposal for the 8-dimensional line integral: Gaussian with
/// the given scale, centered at the projection of `center` onto the line.
struct RadonSampling {
    Vec16 center = Vec16::Zero();
    double scale = 1.0;
};

/// (Rf)(E) = int_E f, Monte Carlo over the line parametrization with a
/// Gaussian importance proposal matched to Gaussian-like decay of f.
RadonEstimate radon_transform(const ScalarField& f, const AffineLine& line, std::int64_t n,
                              std::uint64_t seed, const RadonSampling& sampling = {});

/// Gaussian summand amplitude * exp(-|q - center|^2 / (2 scale^2)); its
/// Radon image over any line is closed-form, which powers the analytic
/// inversion mode.
struct GaussianTerm {
    double amplitude = 1.0;
    double scale = 1.0;
    Vec16 center = Vec16::Zero();
};

using GaussianSum = std::vector<GaussianTerm>;

double evaluate_gaussian_sum(const GaussianSum& f, const Vec16& q);

/// Closed-form Radon transform of a Gaussian sum over the given line.
double radon_gaussian_exact(const GaussianSum& f, const AffineLine& line);

/// Fourth power of the 8-dimensional Laplacian of exp(-u/2) expressed as a
/// polynomial in u = |w|^2, evaluated via the iterated radial recurrence.
double delta4_gaussian_radial(double u);

/// Independent derivation of delta4_gaussian_radial(0) by the multinomial
/// Hermite sum: sum over |alpha| = 4 of (4!/alpha!) prod (2 alpha_i - 1)!!.
double delta4_gaussian_multinomial_at_zero();

/// D g(q) = average over lines E through q of (Laplacian_{E-normal})^4 of
/// w -> g(E + w) at w = 0, lines sampled by the Hopf pushforward measure.
/// Analytic mode: g must be the Radon image of a Gaussian sum.
RadonEstimate inverse_operator_at(const GaussianSum& f, const Vec16& q, std::int64_t n_lines,
                                  std::uint64_t seed);

/// Finite-difference mode for generic line functions: iterated 3-point
/// Laplacian stencils composed four times. Eighth derivatives by FD carry
/// heavy noise amplification (~ machine_eps / h^8); the cancellation
/// detector throws NumericalError when the step is too small for the
/// sampled function scale. Demonstration-grade accuracy.
RadonEstimate inverse_operator_fd(const LineFunction& g, const Vec16& q, std::int64_t n_lines,
                                  std::uint64_t seed, double fd_step);

/// c with D(Rf) = c f, computed on the standard Gaussian through the
/// analytic chain; equals 13440 (2 pi)^4 under this build's measure
/// normalizations.
double inversion_constant(std::int64_t n_lines = 1 << 15, std::uint64_t seed = 1);

/// The closed-form reference value 13440 (2 pi)^4.
double inversion_constant_reference();

} // namespace octoval
