#include "ionsim/benchmark.hpp"

#include "ionsim/config.hpp"
#include "ionsim/constants.hpp"
#include "ionsim/fitting.hpp"

#include "doctest.h"

#include <cmath>

using namespace ionsim;

namespace {
const PulseTimings kT;
}

TEST_CASE("zero-error model has zero failure probability") {
    const ErrorModel ideal;
    for (uint64_t seed : {3u, 19u, 140u}) {
        const GateSequence seq = generate_sequence(500, seed);
        CHECK(simulate_sequence(compile_sequence(seq), kT, ideal) < 1e-12);
    }
}

TEST_CASE("nominal-conditions set mean lies inside the sampling distribution") {
    // 12.1 us pulses, 14 us dead time, +4.5 Hz, Rabi offset 5e-4
    ErrorModel m;
    m.detuning_hz = 4.5;
    m.rabi_offset = 5e-4;
    SequenceSet set{32, 2000, 3, 4};
    const double epg = mean_epg(set, kT, m);
    CHECK(epg > 0.81e-6 - 3 * 0.14e-6);
    CHECK(epg < 0.81e-6 + 3 * 0.14e-6);
}

TEST_CASE("stochastic depolarizing error recovers as the fitted slope") {
    BenchmarkRun run;
    run.shots_per_sequence = 2000;
    run.spam_error = 5e-4;
    run.seed = 21;
    run.threads = 4;
    ErrorModel m;  // no coherent error
    m.depolarizing_per_gate = 1e-6;
    const auto points = run_benchmark(run, kT, m);
    const EpgFit fit = fit_epg(points);
    CHECK(std::abs(fit.slope - 1e-6) < 2.0 * fit.slope_uncertainty);
}

TEST_CASE("benchmark input validation") {
    BenchmarkRun run;
    run.shots_per_sequence = 0;
    CHECK_THROWS_AS(run_benchmark(run, kT, {}), std::invalid_argument);
    BenchmarkRun empty;
    empty.lengths = {};
    CHECK_THROWS_AS(run_benchmark(empty, kT, {}), std::invalid_argument);
}

TEST_CASE("fit_epg on exact line and singular design") {
    std::vector<BenchmarkPoint> pts;
    for (std::size_t L : {10u, 100u, 1000u}) {
        BenchmarkPoint p;
        p.length = L;
        p.trials = 1000000;
        p.failures = static_cast<std::size_t>(std::llround((1e-3 + 1e-6 * L) * p.trials));
        p.sequences = 32;
        pts.push_back(p);
    }
    const EpgFit fit = fit_epg(pts);
    CHECK(fit.slope == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(fit.intercept == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(fit.reduced_chi2 < 1e-6);

    std::vector<BenchmarkPoint> degenerate(3, pts[0]);
    CHECK_THROWS_AS(fit_epg(degenerate), std::invalid_argument);
    CHECK_THROWS_AS(fit_epg({pts[0]}), std::invalid_argument);
}

TEST_CASE("fitted SPAM intercept matches the injected value") {
    BenchmarkRun run;
    run.shots_per_sequence = 1000;
    run.spam_error = 6.8e-4;
    run.seed = 5;
    run.threads = 4;
    const ErrorModel none;
    const auto points = run_benchmark(run, kT, none);
    const EpgFit fit = fit_epg(points);
    CHECK(std::abs(fit.intercept - 6.8e-4) < 3.0 * fit.intercept_uncertainty);
}

TEST_CASE("68% interval coverage is calibrated (Monte Carlo unbiasedness)") {
    // synthetic truth: depolarizing slope with SPAM floor at paper-like counts
    const std::vector<std::size_t> lengths{2, 20, 60, 200, 600, 1200, 2000};
    const double spam = 6.8e-4;
    const double eps = 1e-6;
    const double slope_true = eps * (1.0 - 2.0 * spam);
    Rng rng(777);
    int cover_slope = 0, cover_intercept = 0;
    std::vector<double> chi2s;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        std::vector<BenchmarkPoint> pts;
        for (std::size_t L : lengths) {
            BenchmarkPoint p;
            p.length = L;
            p.trials = 3200;
            const double prob = spam + slope_true * static_cast<double>(L);
            p.failures = rng.binomial(p.trials, prob);
            p.sequences = 32;
            pts.push_back(p);
        }
        const EpgFit fit = fit_epg(pts);
        cover_slope += std::abs(fit.slope - slope_true) <= fit.slope_uncertainty;
        cover_intercept += std::abs(fit.intercept - spam) <= fit.intercept_uncertainty;
        chi2s.push_back(fit.reduced_chi2);
    }
    const double cs = cover_slope / static_cast<double>(reps);
    const double ci = cover_intercept / static_cast<double>(reps);
    CHECK(cs > 0.63);
    CHECK(cs < 0.73);
    CHECK(ci > 0.63);
    CHECK(ci < 0.73);
    const MeanStd chi = mean_std(chi2s);
    CHECK(chi.mean > 0.5);
    CHECK(chi.mean < 1.5);
}

TEST_CASE("mean failure probability is non-decreasing in length") {
    ErrorModel m;
    m.detuning_hz = 4.5;
    m.ac_zeeman_hz = -1.0;
    m.rabi_offset = 5e-4;
    const std::vector<std::size_t> lengths{2, 20, 60, 200, 600, 1200, 2000};
    double prev = -1.0;
    for (std::size_t L : lengths) {
        double total = 0.0;
        for (uint64_t i = 0; i < 16; ++i) {
            const GateSequence seq = generate_sequence(L, sequence_seed(3, 0, i));
            total += simulate_sequence(compile_sequence(seq), kT, m);
        }
        const double mean = total / 16.0;
        CHECK(mean >= prev - 1e-12);
        prev = mean;
    }
}

TEST_CASE("dead time amplifies detuning sensitivity") {
    SequenceSet set{8, 500, 3, 4};
    const auto scan = scan_epg_vs_detuning({-4.0, -2.0, 2.0, 4.0}, set, kT, {});
    for (const auto& p : scan)
        CHECK(p.epg_primary > p.epg_secondary);
}

TEST_CASE("pulse-area response is symmetric at zero detuning to first order") {
    SequenceSet set{16, 1000, 3, 4};
    std::vector<double> offsets{-7.5e-4, -5e-4, -2.5e-4, 2.5e-4, 5e-4, 7.5e-4};
    const auto scan = scan_epg_vs_pulse_area(offsets, 4.5, set, kT, {});
    std::vector<double> x, y;
    for (const auto& p : scan) {
        x.push_back(p.x);
        y.push_back(p.epg_primary);
    }
    const CubicFit fit = cubic_fit(x, y);
    const double quad = std::abs(fit.c2) * 5e-4 * 5e-4;
    const double cubic = std::abs(fit.c3) * 5e-4 * 5e-4 * 5e-4;
    CHECK(cubic < 0.05 * quad);
    // direct +- comparison at 5e-4
    const double plus = scan[4].epg_primary;
    const double minus = scan[1].epg_primary;
    CHECK(std::abs(plus - minus) < 0.1 * 0.5 * (plus + minus));
}

TEST_CASE("off-resonant error vanishes when spectator couplings are zeroed") {
    ManifoldContext ctx;
    ctx.pol = Polarization{0.0, 0.0, 1.0};
    ctx.filter = CouplingFilter::qubit_only;
    ErrorModel m;
    m.detuning_hz = 4.5;
    SequenceSet set{4, 200, 3, 2};
    CHECK(std::abs(off_resonant_epg(set, kT, m, ctx)) < 1e-12);
}

TEST_CASE("off-resonant error scales with the inverse square of the Zeeman splitting") {
    ErrorModel m;
    m.detuning_hz = 4.5;
    SequenceSet set{8, 500, 3, 4};
    ManifoldContext full;
    full.pol = Polarization{0.84, 0.12, 1.0};
    full.b = FieldPoint{146.0942};
    ManifoldContext half = full;
    half.b = FieldPoint{146.0942 / 2.0};  // halves every spectator detuning, near enough
    const double e_full = off_resonant_epg(set, kT, m, full);
    const double e_half = off_resonant_epg(set, kT, m, half);
    CHECK(e_half / e_full > 4.0 * 0.8);
    CHECK(e_half / e_full < 4.0 * 1.6);
}

TEST_CASE("sampling distribution: zero-error collapses, width shrinks with set size") {
    const ErrorModel none;
    const auto zero = sampling_distribution(10, 8, 100, kT, none, 1, 4);
    for (double s : zero.epg_samples)
        CHECK(s < 1e-12);

    ErrorModel m;
    m.detuning_hz = 4.5;
    m.rabi_offset = 5e-4;
    const auto small = sampling_distribution(48, 32, 500, kT, m, 11, 4);
    const auto big = sampling_distribution(48, 128, 500, kT, m, 11, 4);
    const double ratio = small.sigma / big.sigma;
    CHECK(ratio > 2.0 * 0.8);
    CHECK(ratio < 2.0 * 1.25);
}
