#pragma once

#include "octoval/calculus.hpp"
#include "octoval/fields.hpp"

#include <array>
#include <cstdint>

namespace octoval {

/// Smooth compactly supported weight with a declared support box.
struct TestFunction {
    ScalarField field;
    Box support;

    TestFunction() = default;
    TestFunction(const ScalarField& f, const Box& box) : field(f), support(box) {}

    /// Radial polynomial bump inscribed in the box.
    static TestFunction bump_in_box(const Box& box, int power = 4, double amplitude = 1.0);

    double operator()(const Vec16& x) const { return field(x); }
};

/// Monte-Carlo estimate with a standard error computed from 16 independent
/// batches; deterministic given the seed and reduced in batch order.
struct MeasureEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::array<double, 16> batch_means{};
};

inline constexpr int kBatches = 16;

/// Integrate a density over a box: E[density] * volume, batched and
/// parallelized over OCTOVAL_THREADS (or the thread override), reduced in
/// fixed batch order so the result is thread-count independent.
MeasureEstimate integrate_box(const Box& box, std::int64_t n, std::uint64_t seed,
                              const std::function<double(const Vec16&)>& density,
                              int threads = 0);

/// Vector-valued variant: all components share the same sample points.
std::vector<MeasureEstimate> integrate_multi(
    const Box& box, std::int64_t n, std::uint64_t seed, int dim,
    const std::function<void(const Vec16&, double*)>& density, int threads = 0);

/// Same contract as integrate_box but sampling uniformly in a Euclidean ball.
MeasureEstimate integrate_ball(const Vec16& center, double radius, std::int64_t n,
                               std::uint64_t seed,
                               const std::function<double(const Vec16&)>& density,
                               int threads = 0);

/// Difference of two batched estimates sharing the same sample points.
MeasureEstimate estimate_difference(const MeasureEstimate& a, const MeasureEstimate& b);

/// Monte-Carlo estimate of int psi(q) det(d^2 f)(q) dq over supp psi.
/// Throws std::domain_error when f is merely continuous.
MeasureEstimate ma_integral(const ScalarField& f, const TestFunction& psi, std::int64_t n,
                            std::uint64_t seed, int threads = 0);

/// int psi(q) mixed_det(d^2 f, d^2 g) dq; symmetric in (f, g) and equal to
/// ma_integral when f = g (same sampler, same points).
MeasureEstimate mixed_ma_integral(const ScalarField& f, const ScalarField& g,
                                  const TestFunction& psi, std::int64_t n, std::uint64_t seed,
                                  int threads = 0);

/// Trilinear form int f0 mixed_det(d^2 f1, d^2 f2) dq over the union of the
/// three declared support boxes. All fields must carry support boxes.
MeasureEstimate tau(const ScalarField& f0, const ScalarField& f1, const ScalarField& f2,
                    std::int64_t n, std::uint64_t seed, int threads = 0);

struct BlockiLevelReport {
    double level = 0.0;
    MeasureEstimate residual_max;    // determinant-identity defect of the smoothed max
    MeasureEstimate residual_min;    // defect of the induced min form
    double largest_term = 0.0;       // max |term| among the constituent integrals
};

struct BlockiReport {
    std::vector<BlockiLevelReport> levels;
};

/// For each smoothing level j, replace max{u, v} by v + chi(j(u - v))/j and
/// report |LHS - RHS| of the determinant identity (and its min-form) as
/// Monte-Carlo estimates with common random numbers across all terms.
/// FD steps scale as 1/(10 j) with a Richardson pass.
BlockiReport blocki_residual(const ScalarField& u, const ScalarField& v, const TestFunction& psi,
                             const std::vector<double>& smooth_levels, std::int64_t n,
                             std::uint64_t seed, int threads = 0);

} // namespace octoval
