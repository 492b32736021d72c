#include "ionsim/readout.hpp"

#include "ionsim/rng.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>

using namespace ionsim;

namespace {

const DetectionModel kCalibrated{50000.0, 4000.0, 1.168, 1e-3, 1e-4};

DetectionModel no_decay_model() {
    DetectionModel m = kCalibrated;
    m.shelf_lifetime_s = std::numeric_limits<double>::infinity();
    return m;
}

}  // namespace

TEST_CASE("model validation") {
    DetectionModel bad = kCalibrated;
    bad.bin_width_s = 3e-4;  // does not divide 1 ms
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kCalibrated;
    bad.bright_rate_hz = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kCalibrated;
    bad.detection_duration_s = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("all-zero trace classifies as up (dark)") {
    PhotonTrace t;
    t.bins.assign(kCalibrated.bins(), 0);
    CHECK(classify(t, kCalibrated).up);
}

TEST_CASE("dark trace with no background and no decay is all zeros") {
    DetectionModel m = no_decay_model();
    m.dark_rate_hz = 0.0;
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const PhotonTrace t = simulate_trace(true, m, rng);
        for (auto n : t.bins)
            CHECK(n == 0);
    }
}

TEST_CASE("bright traces have the Poisson mean") {
    Rng rng(2);
    const std::size_t shots = 10000;
    double total = 0.0;
    for (std::size_t i = 0; i < shots; ++i) {
        const PhotonTrace t = simulate_trace(false, kCalibrated, rng);
        for (auto n : t.bins)
            total += n;
    }
    const double expected =
        (kCalibrated.bright_rate_hz + kCalibrated.dark_rate_hz) * kCalibrated.detection_duration_s;
    const double sigma = std::sqrt(expected / static_cast<double>(shots));
    CHECK(std::abs(total / shots - expected) < 4.0 * sigma);
}

TEST_CASE("decay times follow the exponential law (KS at 1%)") {
    Rng rng(3);
    std::vector<double> samples(10000);
    for (auto& s : samples)
        s = rng.exponential(1.168);
    // 1% critical value 1.63 / sqrt(n)
    CHECK(oracle::ks_exponential(samples, 1.168) < 1.63 / std::sqrt(10000.0));
}

TEST_CASE("infinite lifetime reduces the classifier to the total-count threshold") {
    const DetectionModel m = no_decay_model();
    const long long nc = total_count_threshold(m);
    Rng rng(4);
    std::size_t checked = 0;
    for (int i = 0; i < 10000; ++i) {
        PhotonTrace t;
        // mixture: dark, bright, and uniform junk traces
        const int kind = i % 3;
        if (kind == 2) {
            t.bins.resize(m.bins());
            for (auto& b : t.bins)
                b = static_cast<uint32_t>(rng.below(12));
        } else {
            t = simulate_trace(kind == 0, m, rng);
        }
        long long total = 0;
        for (auto b : t.bins)
            total += b;
        const bool threshold_up = total <= nc;
        CHECK(classify(t, m).up == threshold_up);
        ++checked;
    }
    CHECK(checked == 10000);
}

TEST_CASE("Monte Carlo error matches the closed-form Poisson tails") {
    const DetectionModel m = no_decay_model();
    const SideErrors analytic = poisson_threshold_errors(m);
    const DetectionBudget mc = detection_error_budget(m, 400000, 5, 4);
    CHECK(std::abs(mc.errors.dark_error - analytic.dark_error) < 3.0 * mc.dark_sigma);
    CHECK(std::abs(mc.errors.bright_error - analytic.bright_error) <
          3.0 * std::max(mc.bright_sigma, 1e-7));
}

TEST_CASE("likelihoods stay finite for large counts") {
    PhotonTrace t;
    t.bins.assign(kCalibrated.bins(), 1000000);
    const Classification c = classify(t, kCalibrated);
    CHECK(std::isfinite(c.log_p_down));
    CHECK(std::isfinite(c.log_p_up));
    CHECK(!c.up);  // a megacount trace is as bright as it gets
}

TEST_CASE("classification is deterministic") {
    Rng rng(6);
    const PhotonTrace t = simulate_trace(true, kCalibrated, rng);
    const Classification a = classify(t, kCalibrated);
    const Classification b = classify(t, kCalibrated);
    CHECK(a.log_p_down == b.log_p_down);
    CHECK(a.log_p_up == b.log_p_up);
    CHECK(a.up == b.up);
}

TEST_CASE("threshold-rule errors are monotone in detection duration without decay") {
    DetectionModel m = no_decay_model();
    double prev = 1.0;
    for (double dur : {0.3e-3, 0.5e-3, 0.7e-3, 0.9e-3, 1.1e-3}) {
        m.detection_duration_s = dur;
        m.bin_width_s = dur / 10.0;
        const SideErrors e = poisson_threshold_errors(m);
        const double mean = e.mean();
        CHECK(mean <= prev + 1e-15);
        prev = mean;
    }
}

TEST_CASE("calibrated detection budget sits at the expected scale") {
    const DetectionBudget b = detection_error_budget(kCalibrated, 150000, 7, 4);
    // combined mean within a factor of two of 1.5e-4
    CHECK(b.errors.mean() > 0.75e-4);
    CHECK(b.errors.mean() < 3.0e-4);
    // decay side dominates
    CHECK(b.errors.dark_error > b.errors.bright_error);
}

TEST_CASE("saturating brightness leaves the shelf-decay floor") {
    DetectionModel m = kCalibrated;
    m.bright_rate_hz = 2e6;
    const DetectionBudget fast = detection_error_budget(m, 60000, 8, 4);
    const DetectionBudget base = detection_error_budget(kCalibrated, 60000, 8, 4);
    CHECK(fast.errors.dark_error < base.errors.dark_error);
    CHECK(fast.errors.bright_error == 0.0);
    CHECK(fast.errors.dark_error >= 0.0);
}

TEST_CASE("shortening the detection window starves the dark-side evidence") {
    DetectionModel short_m = kCalibrated;
    short_m.detection_duration_s = 0.2e-3;
    short_m.bin_width_s = 1e-4;
    const DetectionBudget short_b = detection_error_budget(short_m, 60000, 9, 4);
    const DetectionBudget base = detection_error_budget(kCalibrated, 60000, 9, 4);
    CHECK(short_b.errors.dark_error > base.errors.dark_error);
    // but exposure to shelf decay shrinks with the window
    const double p_decay_short = 1.0 - std::exp(-short_m.detection_duration_s / short_m.shelf_lifetime_s);
    const double p_decay_base = 1.0 - std::exp(-kCalibrated.detection_duration_s / kCalibrated.shelf_lifetime_s);
    CHECK(p_decay_short < p_decay_base);
}
