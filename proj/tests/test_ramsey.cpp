#include "ionsim/ramsey.hpp"

#include "ionsim/constants.hpp"
#include "ionsim/fitting.hpp"

#include "doctest.h"

#include <cmath>

using namespace ionsim;

namespace {

const AtomicConstants kC;

RamseyConfig quiet_config(double t_r, std::size_t shots = 4000) {
    RamseyConfig cfg;
    cfg.free_precession_s = t_r;
    cfg.phase_points_rad = RamseyConfig::default_phases(8);
    cfg.shots_per_point = shots;
    cfg.noise = NoiseModel{};
    cfg.noise.lo_fractional_instability = 0.0;
    return cfg;
}

double clock_field_gauss() {
    static const double b0 =
        field_independent_point(qubit_down(), qubit_up(), kC, {100.0, 200.0}).gauss;
    return b0;
}

}  // namespace

TEST_CASE("config validation") {
    RamseyConfig cfg = quiet_config(1.0);
    cfg.phase_points_rad.resize(3);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = quiet_config(-1.0);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    NoiseModel n;
    n.contrast_floor = 1.5;
    CHECK_THROWS_AS(n.validate(), std::invalid_argument);
}

TEST_CASE("noiseless fringes have unit contrast and phase 2 pi delta t") {
    RamseyConfig cfg = quiet_config(0.5);
    cfg.lo_detuning_hz = 0.3;
    Rng rng(1);
    const double b0 = clock_field_gauss();
    const RamseyFringe f = ramsey_fringe(cfg, [&](double) { return b0; }, kC, rng);
    CHECK(f.contrast > 0.97);
    const double expected = kTwoPi * 0.3 * 0.5;
    CHECK(std::abs(std::remainder(f.fringe_phase_rad - expected, kTwoPi)) < 0.06);
}

TEST_CASE("static field offset shifts the fringe by the clock parabola") {
    const double b0 = clock_field_gauss();
    const double curvature = transition_frequency_curvature(qubit_down(), qubit_up(), {b0}, kC);
    const double t_r = 4.0;
    const double offset_g = 3e-3;  // 3 mG
    RamseyConfig cfg = quiet_config(t_r);
    Rng rng(2);
    const RamseyFringe f =
        ramsey_fringe(cfg, [&](double) { return b0 + offset_g; }, kC, rng);
    const double expected = -kTwoPi * 0.5 * curvature * offset_g * offset_g * t_r;
    CHECK(std::abs(std::remainder(f.fringe_phase_rad - expected, kTwoPi)) < 0.06);
}

TEST_CASE("field-noise calibration reproduces the 16 s contrast") {
    // sigma_B tuned so the fitted coherence time comes out near 50 s
    RamseyConfig cfg = quiet_config(16.0, 6000);
    cfg.noise.field_sigma_gauss = 2.56e-3;
    Rng rng(3);
    const double b0 = clock_field_gauss();
    const RamseyFringe f = ramsey_fringe(cfg, [&](double) { return b0; }, kC, rng);
    CHECK(f.contrast == doctest::Approx(std::exp(-16.0 / 50.0)).epsilon(0.09));
}

TEST_CASE("exponential contrast fit: exact recovery and infinite-T2 sentinel") {
    std::vector<ContrastPoint> exact;
    for (double t : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0})
        exact.push_back({t, 0.98 * std::exp(-t / 50.0), 0.01});
    const CoherenceFit fit = fit_contrast_decay(exact);
    CHECK(fit.t2_star_s == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(fit.contrast0 == doctest::Approx(0.98).epsilon(1e-9));

    std::vector<ContrastPoint> flat;
    for (double t : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0})
        flat.push_back({t, 0.99, 0.01});
    const CoherenceFit inf_fit = fit_contrast_decay(flat);
    CHECK(std::isinf(inf_fit.t2_star_s));
}

TEST_CASE("synthetic noisy data at the default grid recovers T2* = 50 s") {
    Rng rng(4);
    std::vector<ContrastPoint> pts;
    for (double t : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double sigma = 0.011;  // paper-like shot counts
        pts.push_back({t, std::exp(-t / 50.0) + sigma * rng.normal(), sigma});
    }
    const CoherenceFit fit = fit_contrast_decay(pts);
    CHECK(std::abs(fit.t2_star_s - 50.0) < 3.0 * fit.uncertainty_s);
    CHECK(fit.uncertainty_s > 2.0);   // ~10 s scale at these counts
    CHECK(fit.uncertainty_s < 30.0);
}

TEST_CASE("default LO instability lands the calibrated coherence time") {
    Rng rng(5);
    const double b0 = clock_field_gauss();
    std::vector<ContrastPoint> pts;
    for (double t : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        RamseyConfig cfg = quiet_config(t, 3000);
        cfg.noise = NoiseModel{};  // defaults carry the calibrated instability
        const RamseyFringe f = ramsey_fringe(cfg, [&](double) { return b0; }, kC, rng);
        pts.push_back({t, f.contrast, std::sqrt(2.0 / (8.0 * 3000.0))});
    }
    const CoherenceFit fit = fit_contrast_decay(pts);
    CHECK(fit.t2_star_s > 30.0);
    CHECK(fit.t2_star_s < 80.0);
}

TEST_CASE("fringe probabilities and contrast stay in range") {
    RamseyConfig cfg = quiet_config(2.0, 500);
    cfg.noise.field_sigma_gauss = 5e-3;
    cfg.noise.contrast_floor = 0.1;
    Rng rng(6);
    const double b0 = clock_field_gauss();
    const RamseyFringe f = ramsey_fringe(cfg, [&](double) { return b0; }, kC, rng);
    for (double p : f.p_excite) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    CHECK(f.contrast >= 0.0);
    CHECK(f.contrast <= 1.0);
}

TEST_CASE("clock scan is parabolic and symmetric about the clock point") {
    const double b0 = clock_field_gauss();
    std::vector<double> bs, fs, xs;
    for (double db = -0.3; db <= 0.3 + 1e-12; db += 0.01)
        bs.push_back(b0 + db);
    const auto curve = clock_scan(bs, kC);
    // extremum at the clock point within a grid step
    std::size_t min_i = 0;
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (curve[i].frequency_hz < curve[min_i].frequency_hz)
            min_i = i;
    CHECK(std::abs(curve[min_i].b_gauss - b0) <= 0.011);

    for (const auto& p : curve) {
        xs.push_back(p.b_gauss - b0);
        fs.push_back(p.frequency_hz - curve[min_i].frequency_hz);
    }
    const QuadFit quad = quadratic_fit(xs, fs);
    const double curvature = transition_frequency_curvature(qubit_down(), qubit_up(), {b0}, kC);
    CHECK(2.0 * quad.c2 == doctest::Approx(curvature).epsilon(0.01));

    // third-order contamination bounded by the finite-difference oracle
    const CubicFit cubic = cubic_fit(xs, fs);
    const double h = 0.05;
    const double third_fd =
        (transition_frequency_curvature(qubit_down(), qubit_up(), {b0 + h}, kC) -
         transition_frequency_curvature(qubit_down(), qubit_up(), {b0 - h}, kC)) /
        (2.0 * h);
    CHECK(std::abs(cubic.c3 * 6.0 - third_fd) < 0.5 * std::abs(third_fd) + 1e-3);
    CHECK(std::abs(cubic.c3) * 0.3 < 0.02 * std::abs(cubic.c2));
}

TEST_CASE("field servo holds the operating point") {
    ServoConfig cfg;
    cfg.b0_gauss = clock_field_gauss();
    cfg.period_s = 10.0;
    cfg.duration_s = 2000.0;
    cfg.gain = 1.0;
    cfg.measurement_sigma_hz = 250.0;

    // noise floor: sigma_f / |df/dB| of the probe line
    const double sens = std::abs(
        transition_frequency_derivative(cfg.probe_a, cfg.probe_b, {cfg.b0_gauss}, kC));
    const double floor = cfg.measurement_sigma_hz / sens;

    SUBCASE("zero drift settles to the measurement noise floor") {
        Rng rng(7);
        const double b0 = cfg.b0_gauss;
        const auto traj = field_servo(cfg, [&](double) { return b0 + 5e-3; }, kC, rng);
        double late = 0.0;
        std::size_t n = 0;
        for (std::size_t i = traj.size() / 2; i < traj.size(); ++i, ++n)
            late += traj[i].residual_gauss;
        late /= static_cast<double>(n);
        CHECK(late < 4.0 * floor);
    }

    SUBCASE("slow linear drift stays bounded near the steady-state offset") {
        Rng rng(8);
        const double rate = 1e-4;  // gauss per second
        const double b0 = cfg.b0_gauss;
        const auto traj = field_servo(cfg, [&](double t) { return b0 + rate * t; }, kC, rng);
        const double steady = rate * cfg.period_s / cfg.gain;
        for (std::size_t i = traj.size() / 2; i < traj.size(); ++i)
            CHECK(traj[i].residual_gauss < 3.0 * steady + 4.0 * floor);
    }

    SUBCASE("residual noise sits at the mG scale of the transfer-pulse budget") {
        Rng rng(9);
        const double b0 = cfg.b0_gauss;
        const auto traj = field_servo(cfg, [&](double) { return b0; }, kC, rng);
        double rms = 0.0;
        for (const auto& s : traj)
            rms += s.residual_gauss * s.residual_gauss;
        rms = std::sqrt(rms / static_cast<double>(traj.size()));
        CHECK(rms < 2e-3);
    }

    SUBCASE("field-insensitive probe is rejected") {
        ServoConfig bad = cfg;
        bad.probe_a = qubit_down();
        bad.probe_b = qubit_up();
        Rng rng(10);
        const double b0 = cfg.b0_gauss;
        CHECK_THROWS_AS(field_servo(bad, [&](double) { return b0; }, kC, rng),
                        std::invalid_argument);
    }
}
