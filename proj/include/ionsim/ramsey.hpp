#pragma once

#include "ionsim/hyperfine.hpp"
#include "ionsim/rng.hpp"

#include <functional>
#include <vector>

namespace ionsim {

// Decoherence drivers for the Ramsey simulator. Defaults are calibrated, not
// predicted: the local-oscillator instability is chosen so the fitted
// coherence time comes out near 50 s.
struct NoiseModel {
    // white-FM local oscillator; phase variance (2 pi f0 y)^2 * t_R * 1 s,
    // giving exponential contrast decay with T2* = 2 / (2 pi f0 y)^2
    double lo_fractional_instability = 9.95e-12;
    // quasi-static Gaussian field offset per shot, gauss
    double field_sigma_gauss = 0.0;
    // deterministic linear drift of the field, gauss/s
    double field_drift_gauss_per_s = 0.0;
    double contrast_floor = 0.0;

    void validate() const;
};

struct RamseyConfig {
    double free_precession_s = 1.0;
    std::vector<double> phase_points_rad;  // >= 4 for contrast fitting
    std::size_t shots_per_point = 100;
    NoiseModel noise;
    double lo_detuning_hz = 0.0;  // LO frequency minus qubit frequency at B0

    void validate() const;
    static std::vector<double> default_phases(std::size_t n = 8);
};

using FieldTrajectory = std::function<double(double)>;  // B(t), gauss

struct RamseyFringe {
    std::vector<double> phases_rad;
    std::vector<double> p_excite;  // per-phase excitation probability
    double contrast = 0.0;
    double fringe_phase_rad = 0.0;
};

// Two pi/2 pulses separated by free precession. The accumulated phase uses
// the clock parabola around B0: f(B) - f(B0) = (f''/2) (B - B0)^2.
RamseyFringe ramsey_fringe(const RamseyConfig& cfg, const FieldTrajectory& b_of_t,
                           const AtomicConstants& c, Rng& rng);

struct CoherenceFit {
    double t2_star_s = 0.0;  // +infinity when no decay is resolved
    double uncertainty_s = 0.0;
    double contrast0 = 1.0;
};

struct ContrastPoint {
    double t_r_s = 0.0;
    double contrast = 0.0;
    double sigma = 0.0;
};

// weighted fit of C(t) = C0 exp(-t / T2*); infinite-T2 sentinel for
// non-decaying data
CoherenceFit fit_contrast_decay(const std::vector<ContrastPoint>& points);

struct ClockScanPoint {
    double b_gauss = 0.0;
    double frequency_hz = 0.0;
};

std::vector<ClockScanPoint> clock_scan(const std::vector<double>& b_gauss,
                                       const AtomicConstants& c);

struct ServoConfig {
    double period_s = 10.0;
    double gain = 1.0;
    double measurement_sigma_hz = 250.0;  // probe-line frequency measurement noise
    double duration_s = 600.0;
    double b0_gauss = 146.0942;
    HyperfineState probe_a{4, 4};  // field-dependent probe transition
    HyperfineState probe_b{3, 3};
};

struct ServoSample {
    double t_s = 0.0;
    double residual_gauss = 0.0;  // |B - B0| after correction
};

// Periodically measures the probe transition, estimates the field from its
// linear sensitivity at B0 and applies a proportional correction. Throws if
// the probe transition has no field sensitivity at the operating point.
std::vector<ServoSample> field_servo(const ServoConfig& cfg, const FieldTrajectory& b_drift,
                                     const AtomicConstants& c, Rng& rng);

}  // namespace ionsim
