#include "ionsim/spam.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>
#include <numeric>

using namespace ionsim;

namespace {

SpamConfig calibrated_config() {
    SpamConfig cfg;
    cfg.detection = DetectionModel{50000.0, 4000.0, 1.168, 1e-3, 1e-4};
    return cfg;
}

}  // namespace

TEST_CASE("perfect polarization pumps everything to the stretch state") {
    PumpingModel m;
    m.leakage = 0.0;
    m.repetitions = 0;
    const auto pop = simulate_pumping(m);
    CHECK(pop[state_index(stretch_state())] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pumping population stays normalized and follows the geometric law") {
    PumpingModel m;
    m.leakage = 0.035;
    m.pi_pulse_error = 5e-4;
    for (int reps = 0; reps <= 4; ++reps) {
        m.repetitions = reps;
        const auto pop = simulate_pumping(m);
        const double total = std::accumulate(pop.begin(), pop.end(), 0.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pumping_residual(m) ==
              doctest::Approx(pumping_residual_closed_form(m)).epsilon(1e-9));
    }
    // successive cycles shrink the leak by the recapture factor
    m.repetitions = 3;
    const double r3 = pumping_residual(m);
    m.repetitions = 2;
    const double r2 = pumping_residual(m);
    const double g = m.pi_pulse_error + (1.0 - m.pi_pulse_error) * m.leakage;
    CHECK(r3 / r2 == doctest::Approx(g).epsilon(1e-9));
}

TEST_CASE("calibrated pumping reaches the stretch state below 1e-4") {
    PumpingModel m;  // defaults are the calibration
    CHECK(m.repetitions == 2);
    CHECK(pumping_residual(m) < 1e-4);
}

TEST_CASE("pumping validation") {
    PumpingModel m;
    m.leakage = 1.5;
    CHECK_THROWS_AS(simulate_pumping(m), std::invalid_argument);
    m = PumpingModel{};
    m.repetitions = -1;
    CHECK_THROWS_AS(simulate_pumping(m), std::invalid_argument);
}

TEST_CASE("shelving model presets and invariants") {
    const ShelvingModel ideal = ShelvingModel::ideal();
    const ShelvingModel broad = ShelvingModel::broadened();
    CHECK(shelving_error(ideal, stretch_state()) == doctest::Approx(1.0e-4).epsilon(1e-12));
    CHECK(shelving_error(broad, stretch_state()) == doctest::Approx(1.7e-4).epsilon(1e-12));
    for (const auto& s : all_states()) {
        if (s == stretch_state())
            continue;
        CHECK(broad.shelve_prob[state_index(s)] <= 0.30);
    }
    ShelvingModel perfect = ideal;
    perfect.shelve_prob[state_index(stretch_state())] = 1.0;
    CHECK(shelving_error(perfect, stretch_state()) == 0.0);

    ShelvingModel bad = ideal;
    bad.shelve_prob[state_index({4, 3})] = 0.9999;  // would exceed the stretch state
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("transfer chain error composition") {
    CHECK(transfer_chain_error(4, 0.0) == 0.0);
    CHECK(transfer_chain_error(4, 0.5e-4) == doctest::Approx(2.0e-4).epsilon(2e-4));
    CHECK(transfer_chain_error(3, 0.5e-4) == doctest::Approx(1.5e-4).epsilon(2e-4));
    CHECK_THROWS_AS(transfer_chain_error(-1, 0.1), std::invalid_argument);
}

TEST_CASE("detailed transfer mode reproduces the measured pulse error scale") {
    TransferDetail d;  // 1 mG field noise, calibrated pi time
    const auto errs = transfer_pulse_errors_detailed(d, 4);
    REQUIRE(errs.size() == 4);
    const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / 4.0;
    CHECK(mean > 0.25e-4);
    CHECK(mean < 0.75e-4);
    // the chain total reproduces the budget row within 30%
    const double chain = transfer_chain_error_detailed(d, 4);
    CHECK(chain > 1.8e-4 * 0.7);
    CHECK(chain < 1.8e-4 * 1.3);
    // the final pulse rides the field-independent transition and is the cleanest
    CHECK(errs[3] < errs[0]);
}

TEST_CASE("ideal stages give zero combined error") {
    SpamConfig cfg = calibrated_config();
    cfg.pumping.leakage = 0.0;
    cfg.pumping.pi_pulse_error = 0.0;
    cfg.transfer_per_pulse_error = 0.0;
    for (auto& p : cfg.shelving.shelve_prob)
        p = 0.0;
    cfg.shelving.shelve_prob[state_index(stretch_state())] = 1.0;
    cfg.wrong_shelve_down = 0.0;
    cfg.detection.bright_rate_hz = 5e5;
    cfg.detection.dark_rate_hz = 0.0;
    cfg.detection.shelf_lifetime_s = std::numeric_limits<double>::infinity();
    const SpamResult r = spam_experiment(cfg, 20000, 42, 4);
    CHECK(r.measured_combined == 0.0);
    CHECK(r.budget.combined < 1e-12);
}

TEST_CASE("calibrated pipeline reproduces the measured combined error") {
    const SpamConfig cfg = calibrated_config();
    const SpamResult r = spam_experiment(cfg, 150000, 3, 4);
    const double sigma = std::sqrt(6.8e-4 / (2.0 * 150000.0));
    CHECK(std::abs(r.measured_combined - 6.8e-4) < 2.0 * sigma);
    // error split leans to the dark side as in the measured histograms
    CHECK(r.error_up > r.error_down);
}

TEST_CASE("stretch-only mode matches the auxiliary measurement") {
    SpamConfig cfg = calibrated_config();
    cfg.stretch_only = true;
    cfg.shelving = ShelvingModel::ideal();
    const SpamResult r = spam_experiment(cfg, 150000, 3, 4);
    CHECK(std::abs(r.measured_combined - 3.6e-4) < 2.0 * 0.5e-4);
}

TEST_CASE("budget accounting invariants") {
    const SpamConfig cfg = calibrated_config();
    const SideErrors det{2.4e-4, 0.1e-4};
    const SpamBudget base = spam_budget(cfg, det);

    // Table-shaped rows
    CHECK(base.prep_stretch == doctest::Approx(pumping_residual(cfg.pumping)).epsilon(1e-12));
    CHECK(base.transfer_in == doctest::Approx(1.75e-4).epsilon(1e-3));
    CHECK(base.transfer_out == doctest::Approx(2.0e-4).epsilon(1e-3));
    CHECK(base.shelving == doctest::Approx(1.7e-4).epsilon(1e-12));

    // combined stays below the first-order sum (plus cross-term allowance)
    const double parts = base.prep_stretch + base.transfer_in + base.transfer_out +
                         base.shelving + base.detection;
    CHECK(base.combined <= 1.05 * parts);

    // removing any stage strictly decreases the combined error
    {
        SpamConfig c = cfg;
        c.pumping.leakage = 0.0;
        CHECK(spam_budget(c, det).combined < base.combined);
    }
    {
        SpamConfig c = cfg;
        c.transfer_per_pulse_error = 0.0;
        CHECK(spam_budget(c, det).combined < base.combined);
    }
    {
        SpamConfig c = cfg;
        c.shelving.shelve_prob[state_index(stretch_state())] = 1.0;
        c.wrong_shelve_down = 1e-12;
        CHECK(spam_budget(c, det).combined < base.combined);
    }
    CHECK(spam_budget(cfg, SideErrors{0.0, 0.0}).combined < base.combined);

    // first-order additivity: d(combined)/d(stage error) is close to one
    SpamConfig bumped = cfg;
    bumped.pumping.leakage += 2e-3;
    const double d_stage =
        pumping_residual(bumped.pumping) - pumping_residual(cfg.pumping);
    const double d_combined = spam_budget(bumped, det).combined - base.combined;
    CHECK(d_combined / d_stage == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("monte carlo agrees with the analytic composition") {
    const SpamConfig cfg = calibrated_config();
    const SpamResult r = spam_experiment(cfg, 200000, 11, 4);
    // relative deviation under 5% requires headroom for MC noise at this n;
    // use 3 sigma + 5% band
    const double tol = 0.05 * r.budget.combined + 3.0 * r.measured_sigma;
    CHECK(std::abs(r.measured_combined - r.budget.combined) < tol);
}

TEST_CASE("spam experiment rejects zero shots") {
    CHECK_THROWS_AS(spam_experiment(calibrated_config(), 0, 1, 1), std::invalid_argument);
}
