#pragma once

#include "ionsim/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ionsim {

// Time-resolved fluorescence detection. "Bright" is an unshelved ion
// scattering at bright_rate on top of the dark_rate background; "dark" is a
// shelved ion that turns bright when the shelf decays (exponential lifetime).
struct DetectionModel {
    double bright_rate_hz = 50000.0;
    double dark_rate_hz = 5000.0;
    double shelf_lifetime_s = 1.168;
    double detection_duration_s = 1e-3;
    double bin_width_s = 1e-4;

    int bins() const;
    void validate() const;  // throws on invalid geometry or rates
};

struct PhotonTrace {
    std::vector<uint32_t> bins;
    std::optional<bool> truth_dark;  // generating state, when simulated
};

// decision = up (shelved/dark) iff log_p_up >= log_p_down (ties classify up)
struct Classification {
    double log_p_down = 0.0;  // log-likelihood of the bright (|down>) model
    double log_p_up = 0.0;    // log-likelihood of the dark-with-decay (|up>) model
    bool up = false;
    double log_ratio() const { return log_p_up - log_p_down; }
};

PhotonTrace simulate_trace(bool truth_dark, const DetectionModel& m, Rng& rng);

// Likelihood-ratio classifier: the dark model marginalizes the decay time at
// bin resolution (decay inside a bin contributes half a bin of fluorescence;
// Poisson factors are exact), the bright model is constant-rate.
Classification classify(const PhotonTrace& trace, const DetectionModel& m);

// With an infinite shelf lifetime the classifier reduces to a threshold on
// the total count: dark iff N <= floor(b T / log(1 + b/d)).
long long total_count_threshold(const DetectionModel& m);

struct SideErrors {
    double dark_error = 0.0;    // P(classified bright | prepared dark)
    double bright_error = 0.0;  // P(classified dark | prepared bright)
    double mean() const { return 0.5 * (dark_error + bright_error); }
};

// closed-form Poisson tail errors of the total-count threshold rule
// (never-decaying dark model)
SideErrors poisson_threshold_errors(const DetectionModel& m);

struct DetectionBudget {
    SideErrors errors;
    double dark_sigma = 0.0;
    double bright_sigma = 0.0;
    std::size_t shots_per_side = 0;
};

// Monte Carlo misclassification estimate per prepared side
DetectionBudget detection_error_budget(const DetectionModel& m, std::size_t shots_per_side,
                                       uint64_t seed, unsigned threads = 1);

}  // namespace ionsim
