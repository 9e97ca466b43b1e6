#include "octoval/measure.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace octoval {

namespace {

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("OCTOVAL_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 1;
}

/// Batched vector-valued integrator over an arbitrary sampler. Every
/// component sees the same sample points (common random numbers); batches
/// may run on several threads but are reduced in index order, so the result
/// is thread-count independent.
std::vector<MeasureEstimate> integrate_multi_sampler(
    const std::function<Vec16(Rng&)>& draw, double vol, std::int64_t n, std::uint64_t seed,
    int dim, const std::function<void(const Vec16&, double*)>& density, int threads) {
    const std::int64_t per_batch = std::max<std::int64_t>(1, n / kBatches);

    std::vector<std::vector<double>> batch_vals(kBatches, std::vector<double>(std::size_t(dim)));
    auto run_batch = [&](int b) {
        Rng rng = Rng::stream(seed, std::uint64_t(b));
        std::vector<double> acc(std::size_t(dim), 0.0);
        std::vector<double> out(std::size_t(dim), 0.0);
        for (std::int64_t k = 0; k < per_batch; ++k) {
            const Vec16 q = draw(rng);
            density(q, out.data());
            for (int d = 0; d < dim; ++d) acc[std::size_t(d)] += out[std::size_t(d)];
        }
        for (int d = 0; d < dim; ++d)
            batch_vals[std::size_t(b)][std::size_t(d)] = vol * acc[std::size_t(d)] / double(per_batch);
    };

    const int nthreads = std::min(resolve_threads(threads), kBatches);
    if (nthreads <= 1) {
        for (int b = 0; b < kBatches; ++b) run_batch(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(nthreads));
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < kBatches; b = next.fetch_add(1)) run_batch(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<MeasureEstimate> result{std::size_t(dim)};
    for (int d = 0; d < dim; ++d) {
        MeasureEstimate& est = result[std::size_t(d)];
        est.n_samples = per_batch * kBatches;
        est.seed = seed;
        double mean = 0.0;
        for (int b = 0; b < kBatches; ++b) {
            est.batch_means[std::size_t(b)] = batch_vals[std::size_t(b)][std::size_t(d)];
            mean += est.batch_means[std::size_t(b)];
        }
        mean /= kBatches;
        double var = 0.0;
        for (int b = 0; b < kBatches; ++b) {
            const double dm = est.batch_means[std::size_t(b)] - mean;
            var += dm * dm;
        }
        est.value = mean;
        est.std_error = std::sqrt(var / (kBatches - 1) / kBatches);
    }
    return result;
}

void require_smooth(const ScalarField& f, const char* who) {
    if (f.hint == ScalarField::Smoothness::Continuous)
        throw std::domain_error(std::string(who) +
                                ": field is merely continuous; mollify it first");
}

} // namespace

std::vector<MeasureEstimate> integrate_multi(
    const Box& box, std::int64_t n, std::uint64_t seed, int dim,
    const std::function<void(const Vec16&, double*)>& density, int threads) {
    return integrate_multi_sampler([box](Rng& rng) { return box.sample(rng); }, box.volume(), n,
                                   seed, dim, density, threads);
}

TestFunction TestFunction::bump_in_box(const Box& box, int power, double amplitude) {
    if ((box.hi - box.lo).minCoeff() <= 0.0)
        throw std::domain_error("bump_in_box: degenerate box");
    (void)power; // the plateau profile is C^2 by construction
    TestFunction tf;
    tf.field = fields::smooth_box_bump(box, amplitude);
    tf.support = box;
    return tf;
}

MeasureEstimate integrate_box(const Box& box, std::int64_t n, std::uint64_t seed,
                              const std::function<double(const Vec16&)>& density, int threads) {
    auto vec = integrate_multi(
        box, n, seed, 1, [&](const Vec16& q, double* out) { out[0] = density(q); }, threads);
    return vec[0];
}

MeasureEstimate integrate_ball(const Vec16& center, double radius, std::int64_t n,
                               std::uint64_t seed,
                               const std::function<double(const Vec16&)>& density, int threads) {
    const double vol = std::pow(radius, 16.0) * std::pow(kPi, 8.0) / 40320.0;
    auto vec = integrate_multi_sampler(
        [center, radius](Rng& rng) { return Vec16(center + radius * rng.ball<16>()); }, vol, n,
        seed, 1, [&](const Vec16& q, double* out) { out[0] = density(q); }, threads);
    return vec[0];
}

MeasureEstimate estimate_difference(const MeasureEstimate& a, const MeasureEstimate& b) {
    if (a.n_samples != b.n_samples || a.seed != b.seed)
        throw std::invalid_argument("estimate_difference: estimates are not paired");
    MeasureEstimate d;
    d.n_samples = a.n_samples;
    d.seed = a.seed;
    double mean = 0.0;
    for (int i = 0; i < kBatches; ++i) {
        d.batch_means[std::size_t(i)] =
            a.batch_means[std::size_t(i)] - b.batch_means[std::size_t(i)];
        mean += d.batch_means[std::size_t(i)];
    }
    mean /= kBatches;
    double var = 0.0;
    for (int i = 0; i < kBatches; ++i) {
        const double dm = d.batch_means[std::size_t(i)] - mean;
        var += dm * dm;
    }
    d.value = mean;
    d.std_error = std::sqrt(var / (kBatches - 1) / kBatches);
    return d;
}

MeasureEstimate ma_integral(const ScalarField& f, const TestFunction& psi, std::int64_t n,
                            std::uint64_t seed, int threads) {
    require_smooth(f, "ma_integral");
    return integrate_box(
        psi.support, n, seed,
        [&](const Vec16& q) {
            const double w = psi(q);
            if (w == 0.0) return 0.0;
            return w * det(octonionic_hessian(f, q));
        },
        threads);
}

MeasureEstimate mixed_ma_integral(const ScalarField& f, const ScalarField& g,
                                  const TestFunction& psi, std::int64_t n, std::uint64_t seed,
                                  int threads) {
    require_smooth(f, "mixed_ma_integral");
    require_smooth(g, "mixed_ma_integral");
    return integrate_box(
        psi.support, n, seed,
        [&](const Vec16& q) {
            const double w = psi(q);
            if (w == 0.0) return 0.0;
            return w * mixed_det(octonionic_hessian(f, q), octonionic_hessian(g, q));
        },
        threads);
}

MeasureEstimate tau(const ScalarField& f0, const ScalarField& f1, const ScalarField& f2,
                    std::int64_t n, std::uint64_t seed, int threads) {
    if (!f0.support || !f1.support || !f2.support)
        throw std::domain_error("tau: all three fields must declare compact support");
    require_smooth(f1, "tau");
    require_smooth(f2, "tau");
    const Box box = f0.support->hull(*f1.support).hull(*f2.support);
    return integrate_box(
        box, n, seed,
        [&](const Vec16& q) {
            const double w = f0(q);
            if (w == 0.0) return 0.0;
            return w * mixed_det(octonionic_hessian(f1, q), octonionic_hessian(f2, q));
        },
        threads);
}

BlockiReport blocki_residual(const ScalarField& u, const ScalarField& v, const TestFunction& psi,
                             const std::vector<double>& smooth_levels, std::int64_t n,
                             std::uint64_t seed, int threads) {
    require_smooth(u, "blocki_residual");
    require_smooth(v, "blocki_residual");

    BlockiReport report;
    for (const double level : smooth_levels) {
        if (level <= 0.0) throw std::domain_error("blocki_residual: levels must be positive");
        ScalarField smooth_max;
        smooth_max.hint = ScalarField::Smoothness::Smooth;
        const auto ue = u.eval, ve = v.eval;
        smooth_max.eval = [ue, ve, level](const Vec16& x) {
            const double vv = ve(x);
            return vv + chi(level * (ue(x) - vv)) / level;
        };

        HessianOptions opt;
        opt.richardson = true;
        opt.step_override = 1.0 / (10.0 * level);

        // Densities share one sample stream: [residual_max, residual_min,
        // det(max), mixed(max, u+v), mixed(u,v), det u, det v, det(min)].
        auto density = [&](const Vec16& q, double* out) {
            const double w = psi(q);
            if (w == 0.0) {
                for (int i = 0; i < 8; ++i) out[i] = 0.0;
                return;
            }
            const HMatrix2 hu = octonionic_hessian(u, q, opt);
            const HMatrix2 hv = octonionic_hessian(v, q, opt);
            const HMatrix2 hm = octonionic_hessian(smooth_max, q, opt);
            const HMatrix2 hmin = hu + hv - hm;
            const double det_m = det(hm);
            const double mix_m = mixed_det(hm, hu) + mixed_det(hm, hv);
            const double mix_uv = mixed_det(hu, hv);
            const double det_u = det(hu);
            const double det_v = det(hv);
            const double det_min = det(hmin);
            out[0] = w * (det_m - mix_m + mix_uv);
            out[1] = w * (det_min + det_m - det_u - det_v);
            out[2] = w * det_m;
            out[3] = w * mix_m;
            out[4] = w * mix_uv;
            out[5] = w * det_u;
            out[6] = w * det_v;
            out[7] = w * det_min;
        };

        auto est = integrate_multi(psi.support, n, seed, 8, density, threads);
        BlockiLevelReport lvl;
        lvl.level = level;
        lvl.residual_max = est[0];
        lvl.residual_min = est[1];
        for (int i = 2; i < 8; ++i) lvl.largest_term = std::max(lvl.largest_term, std::abs(est[std::size_t(i)].value));
        report.levels.push_back(std::move(lvl));
    }
    return report;
}

} // namespace octoval
