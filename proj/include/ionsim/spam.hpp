#pragma once

#include "ionsim/hyperfine.hpp"
#include "ionsim/readout.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ionsim {

// Microwave-enhanced optical pumping toward the stretch state (4,+4).
// Each sigma+ pumping pass leaves fraction `leakage` outside the stretch
// state, split between the M=+3 and M=+2 pools; every enhancement cycle
// moves the leaked population to F=3 with pi-pulses (fidelity
// 1 - pi_pulse_error) and re-pumps it.
struct PumpingModel {
    double leakage = 0.035;
    int repetitions = 2;
    double pi_pulse_error = 5e-4;
    double leak_split_m3 = 0.7;  // fraction of the leak in the M=+3 pool

    void validate() const;
};

// population over the 16 ground states (all_states() order)
std::array<double, 16> simulate_pumping(const PumpingModel& m);

// 1 - P(stretch) after pumping
double pumping_residual(const PumpingModel& m);

// closed-form geometric residual, the oracle for the cycle recursion
double pumping_residual_closed_form(const PumpingModel& m);

struct ShelvingModel {
    std::array<double, 16> shelve_prob{};  // P(ends in D5/2), all_states() order

    void validate() const;

    // calibration presets: stretch-state shelving error 1.0e-4 assuming ideal
    // 393 nm parameters, or 1.7e-4 with the broadened 393 nm rate
    static ShelvingModel ideal();
    static ShelvingModel broadened();
};

// probability that population entering in `s` ends on the wrong side of the
// bright/dark divide: 1 - P(shelve) for the stretch path, P(shelve) otherwise
double shelving_error(const ShelvingModel& m, const HyperfineState& entering);

// 1 - prod(1 - e) over a chain of n pi-pulses
double transfer_chain_error(int n_pulses, double per_pulse_error);

// Detailed mode: each transfer pi-pulse simulated on the full 16-state
// manifold, with Gaussian magnetic-field noise on its (field-sensitive)
// transition averaged by Gauss-Hermite quadrature. Includes off-resonant
// spectator excitation.
struct TransferDetail {
    double pi_time_s = 2.0e-6;
    double field_noise_gauss = 1e-3;
    FieldPoint b{146.0942};
    AtomicConstants constants;
    Polarization pol{0.84, 0.12, 1.0};
};

// per-pulse infidelities along (4,+4)->(3,+3)->(4,+2)->(3,+1)->(4,0)
std::vector<double> transfer_pulse_errors_detailed(const TransferDetail& d, int n_pulses);
double transfer_chain_error_detailed(const TransferDetail& d, int n_pulses);

struct SpamConfig {
    PumpingModel pumping;
    double transfer_per_pulse_error = 0.5e-4;
    int pulses_in_up = 3;    // transfer to |up>
    int pulses_in_down = 4;  // transfer to |down>
    int pulses_out = 4;      // readout transfer block
    ShelvingModel shelving = ShelvingModel::broadened();
    double wrong_shelve_down = 0.0;  // filled from shelving model of (3,+1) when 0
    DetectionModel detection;
    bool stretch_only = false;  // skip transfer pulses, prepare/readout (4,+4) only
};

struct SpamBudget {
    double prep_stretch = 0.0;
    double transfer_in = 0.0;   // mean of the up/down chains
    double transfer_out = 0.0;
    double shelving = 0.0;      // stretch-path shelving error
    double detection = 0.0;     // mean of the two detection sides
    double combined = 0.0;      // mean error over both prepared states
};

struct SpamResult {
    SpamBudget budget;            // analytic stage decomposition
    double measured_combined = 0.0;
    double measured_sigma = 0.0;  // binomial
    double error_up = 0.0;        // per prepared side
    double error_down = 0.0;
    std::size_t shots_per_state = 0;
};

// analytic per-side and combined error from the stage composition
SpamBudget spam_budget(const SpamConfig& cfg, const SideErrors& detection_errors);

// Full-chain Monte Carlo: pumping -> transfer-in -> transfer-out -> shelving
// -> trace simulation -> likelihood classification. Stage errors branch
// classically and are absorbing (a failed stage leaves the ion off the
// intended path; later stages do not revisit it).
SpamResult spam_experiment(const SpamConfig& cfg, std::size_t shots_per_state, uint64_t seed,
                           unsigned threads = 1);

}  // namespace ionsim
