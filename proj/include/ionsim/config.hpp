#pragma once

#include "ionsim/benchmark.hpp"
#include "ionsim/hyperfine.hpp"
#include "ionsim/ramsey.hpp"
#include "ionsim/readout.hpp"
#include "ionsim/spam.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ionsim {

struct LevelScan {
    double b_min_gauss = 0.0;
    double b_max_gauss = 300.0;
    double b_step_gauss = 1.0;
};

struct ClockScanConfig {
    double b_center_gauss = 146.094;
    double half_span_gauss = 2.0;
    double step_gauss = 0.02;
};

struct BenchmarkConfig {
    std::vector<std::size_t> lengths{2, 20, 60, 200, 600, 1200, 2000};
    std::size_t sequences_per_length = 32;
    std::size_t shots_per_sequence = 100;
    double detuning_hz = 4.5;
    double rabi_offset = 5e-4;
    bool dead_time = true;
    bool use_16_level = false;
    double depolarizing_per_gate = 0.0;
    double spam_error = 6.8e-4;
    std::size_t scan_set_size = 32;
    std::size_t scan_length = 2000;
    std::size_t sampling_sets = 500;
};

struct RamseyRunConfig {
    std::vector<double> t_r_grid_s{0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    std::size_t phase_points = 8;
    std::size_t shots_per_point = 200;
    NoiseModel noise;
    double lo_detuning_hz = 0.0;
};

struct RunConfig {
    AtomicConstants constants;
    Polarization pol{0.84, 0.12, 1.0};
    PulseTimings timings;
    double trap_rf_shift_hz = -5.0;  // differential shift from trap r.f., reporting offset only
    BenchmarkConfig benchmark;
    DetectionModel detection{50000.0, 4000.0, 1.168, 1e-3, 1e-4};
    SpamConfig spam;
    RamseyRunConfig ramsey;
    ServoConfig servo;
    LevelScan levels;
    ClockScanConfig clock;
    uint64_t seed = 3;
    std::string output_dir = ".";

    // derived quantities under the configured constants
    FieldPoint clock_field() const;
    double qubit_frequency(FieldPoint b) const;
    double calibrated_ac_zeeman_hz() const;  // at the nominal pi/2 Rabi frequency
    ErrorModel error_model() const;
    ManifoldContext manifold_context() const;
};

RunConfig default_config();

// JSON round trip; load substitutes defaults for missing keys
RunConfig config_from_json_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json_text(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

// every violated invariant with the offending key path; empty when clean
std::vector<std::string> validate_config(const RunConfig& cfg);

// FNV-1a hash of the canonical JSON text, for output provenance
std::string config_hash(const RunConfig& cfg);

}  // namespace ionsim
