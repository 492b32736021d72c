#pragma once

#include "ionsim/gates.hpp"
#include "ionsim/hyperfine.hpp"
#include "ionsim/manifold.hpp"

#include <cstdint>
#include <vector>

namespace ionsim {

// Imperfections applied when a compiled sequence is simulated. The programmed
// detuning acts in every segment; during drive pulses the effective detuning
// is detuning_hz - ac_zeeman_hz (the transition shifts by ac_zeeman_hz while
// the drive is on, -1.0 Hz at the calibrated polarization).
struct ErrorModel {
    double detuning_hz = 0.0;
    double ac_zeeman_hz = 0.0;
    double rabi_offset = 0.0;  // fractional Rabi-frequency error
    bool dead_time = true;
    double depolarizing_per_gate = 0.0;  // stochastic outcome-flip probability per gate
};

// 16-level simulation context; the a.c. Zeeman shift and spectator flopping
// emerge from the manifold couplings, so ErrorModel::ac_zeeman_hz is ignored
// on this path.
struct ManifoldContext {
    FieldPoint b{146.0942};
    AtomicConstants constants;
    Polarization pol;
    CouplingFilter filter = CouplingFilter::all;
};

// expected failure probability of one compiled sequence (2-level path)
double simulate_sequence(const CompiledSequence& seq, const PulseTimings& t, const ErrorModel& m);

// expected failure probability with the full 16-state ground level
double simulate_sequence_16(const CompiledSequence& seq, const PulseTimings& t,
                            const ErrorModel& m, const ManifoldContext& ctx);

struct BenchmarkPoint {
    std::size_t length = 0;
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t sequences = 0;
};

struct EpgFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_uncertainty = 0.0;
    double intercept_uncertainty = 0.0;
    double reduced_chi2 = 0.0;
};

struct BenchmarkRun {
    std::vector<std::size_t> lengths{2, 20, 60, 200, 600, 1200, 2000};
    std::size_t sequences_per_length = 32;
    std::size_t shots_per_sequence = 100;
    double spam_error = 6.8e-4;
    uint64_t seed = 1;
    unsigned threads = 1;
};

// Samples shot outcomes per sequence with failure probability combining the
// simulated sequence error, the depolarizing channel and the SPAM error.
// Throws when shots_per_sequence == 0.
std::vector<BenchmarkPoint> run_benchmark(const BenchmarkRun& run, const PulseTimings& t,
                                          const ErrorModel& m);

// Weighted straight-line fit of error fraction vs gate count; binomial
// uncertainties with model-based iterated weights. Throws on a singular
// design (fewer than two distinct lengths).
EpgFit fit_epg(const std::vector<BenchmarkPoint>& points);

// standard randomized set used by the expected-value scans
struct SequenceSet {
    std::size_t n_sequences = 32;
    std::size_t length = 2000;
    uint64_t seed = 1;
    unsigned threads = 1;
};

// mean expected-value EPG (mean sequence failure / length) over the set
double mean_epg(const SequenceSet& set, const PulseTimings& t, const ErrorModel& m);
double mean_epg_16(const SequenceSet& set, const PulseTimings& t, const ErrorModel& m,
                   const ManifoldContext& ctx);

struct ScanPoint {
    double x = 0.0;
    double epg_primary = 0.0;    // with dead time (detuning scan) / at zero detuning (area scan)
    double epg_secondary = 0.0;  // without dead time / at +4.5 Hz detuning
};

// EPG vs programmed microwave detuning, with and without the 14 us dead time.
std::vector<ScanPoint> scan_epg_vs_detuning(const std::vector<double>& detunings_hz,
                                            const SequenceSet& set, const PulseTimings& t,
                                            const ErrorModel& base);

// EPG vs fractional pulse-area (Rabi) error at fixed duration, for drive
// detunings 0 and detuning_secondary_hz.
std::vector<ScanPoint> scan_epg_vs_pulse_area(const std::vector<double>& rabi_offsets,
                                              double detuning_secondary_hz,
                                              const SequenceSet& set, const PulseTimings& t,
                                              const ErrorModel& base);

// 16-level EPG minus the matched 2-level EPG at the same programmed error
// model: isolates the spectator-transition (off-resonant) error.
double off_resonant_epg(const SequenceSet& set, const PulseTimings& t, const ErrorModel& m,
                        const ManifoldContext& ctx);

struct SamplingDistribution {
    std::vector<double> epg_samples;  // one per sequence set
    double mu = 0.0;
    double sigma = 0.0;
};

// Distribution of the mean EPG across n_sets independently drawn sets.
SamplingDistribution sampling_distribution(std::size_t n_sets, std::size_t set_size,
                                           std::size_t length, const PulseTimings& t,
                                           const ErrorModel& m, uint64_t seed, unsigned threads);

// derived seed for sequence (set_index, seq_index) under a master seed
uint64_t sequence_seed(uint64_t master, uint64_t set_index, uint64_t seq_index);

// failure probability combining two independent flip processes
inline double combine_flip(double a, double b) { return a + b - 2.0 * a * b; }

}  // namespace ionsim
