#include "ionsim/benchmark.hpp"

#include "ionsim/constants.hpp"
#include "ionsim/fitting.hpp"
#include "ionsim/threading.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace ionsim {

namespace {

// The compiled slot grid uses only four drive phases; build each propagator
// once per error model.
struct SlotPropagators {
    std::array<Mat2, 4> drive;
    Mat2 slot_delay;
    Mat2 dead_gap;
};

SlotPropagators make_two_level(const PulseTimings& t, const ErrorModel& m) {
    SlotPropagators p;
    const double rabi = t.nominal_rabi_rad() * (1.0 + m.rabi_offset);
    const double pulse_detuning = m.detuning_hz - m.ac_zeeman_hz;
    for (int q = 0; q < 4; ++q)
        p.drive[q] = two_level_propagator(
            PulseSpec::drive_pulse(rabi, pulse_detuning, q * kPi / 2.0, t.pi2_time_s));
    p.slot_delay = two_level_propagator(PulseSpec::delay(m.detuning_hz, t.pi2_time_s));
    p.dead_gap = two_level_propagator(PulseSpec::delay(m.detuning_hz, t.dead_time_s));
    return p;
}

int phase_quarter(double phase_rad) {
    int q = static_cast<int>(std::lround(phase_rad / (kPi / 2.0))) % 4;
    return q < 0 ? q + 4 : q;
}

template <typename Mat, typename Slots>
double run_slots(const Slots& prop, const CompiledSequence& seq, bool dead_time, int idx_up,
                 int idx_down) {
    Mat u = Mat::Identity();
    int count = 0;
    bool first = true;
    for (const CompiledSlot& s : seq.slots) {
        if (!first && dead_time) {
            u = prop.dead_gap * u;
            ++count;
        }
        first = false;
        u = (s.is_drive ? prop.drive[phase_quarter(s.phase_rad)] : prop.slot_delay) * u;
        if (++count % kReunitarizeEvery == 0)
            u = reunitarize(u);
    }
    const int expected = seq.expect_up ? idx_up : idx_down;
    const double p_success = std::norm(u(expected, idx_up));
    return std::clamp(1.0 - p_success, 0.0, 1.0);
}

double depolarizing_failure(std::size_t n_gates, double per_gate) {
    if (per_gate <= 0.0)
        return 0.0;
    return 0.5 * (1.0 - std::pow(1.0 - 2.0 * per_gate, static_cast<double>(n_gates)));
}

struct ManifoldSlotPropagators {
    std::array<Mat16, 4> drive;
    Mat16 slot_delay;
    Mat16 dead_gap;
};

ManifoldSlotPropagators make_sixteen_level(const PulseTimings& t, const ErrorModel& m,
                                           const ManifoldContext& ctx) {
    ManifoldDrive d;
    d.frequency_hz =
        transition_frequency(qubit_down(), qubit_up(), ctx.b, ctx.constants) + m.detuning_hz;
    d.qubit_rabi_rad = t.nominal_rabi_rad() * (1.0 + m.rabi_offset);
    d.pol = ctx.pol;
    d.filter = ctx.filter;
    ManifoldEngine engine(d, ctx.b, ctx.constants);
    ManifoldSlotPropagators p;
    for (int q = 0; q < 4; ++q)
        p.drive[q] = engine.pulse(q * kPi / 2.0, t.pi2_time_s);
    p.slot_delay = engine.delay(t.pi2_time_s);
    p.dead_gap = engine.delay(t.dead_time_s);
    return p;
}

}  // namespace

double simulate_sequence(const CompiledSequence& seq, const PulseTimings& t, const ErrorModel& m) {
    const SlotPropagators prop = make_two_level(t, m);
    const double p_coherent = run_slots<Mat2>(prop, seq, m.dead_time, 1, 0);
    return combine_flip(p_coherent, depolarizing_failure(seq.n_gates, m.depolarizing_per_gate));
}

double simulate_sequence_16(const CompiledSequence& seq, const PulseTimings& t,
                            const ErrorModel& m, const ManifoldContext& ctx) {
    const ManifoldSlotPropagators prop = make_sixteen_level(t, m, ctx);
    const int up = state_index(qubit_up());
    const int down = state_index(qubit_down());
    const double p_coherent = run_slots<Mat16>(prop, seq, m.dead_time, up, down);
    return combine_flip(p_coherent, depolarizing_failure(seq.n_gates, m.depolarizing_per_gate));
}

uint64_t sequence_seed(uint64_t master, uint64_t set_index, uint64_t seq_index) {
    Rng r(master, set_index, seq_index);
    return r.u64();
}

std::vector<BenchmarkPoint> run_benchmark(const BenchmarkRun& run, const PulseTimings& t,
                                          const ErrorModel& m) {
    if (run.lengths.empty())
        throw std::invalid_argument("run_benchmark: lengths must be non-empty");
    if (run.shots_per_sequence == 0)
        throw std::invalid_argument("run_benchmark: shots_per_sequence must be > 0");
    std::vector<BenchmarkPoint> points(run.lengths.size());
    const std::size_t n_jobs = run.lengths.size() * run.sequences_per_length;
    std::vector<std::size_t> failures(n_jobs, 0);
    parallel_for(n_jobs, run.threads, [&](std::size_t job) {
        const std::size_t li = job / run.sequences_per_length;
        const std::size_t si = job % run.sequences_per_length;
        const uint64_t seed = sequence_seed(run.seed, li, si);
        const GateSequence seq = generate_sequence(run.lengths[li], seed);
        const double p_seq = simulate_sequence(compile_sequence(seq), t, m);
        const double p_shot = combine_flip(p_seq, run.spam_error);
        Rng shot_rng(seed, 0x5e0f5u);
        std::size_t f = 0;
        for (std::size_t s = 0; s < run.shots_per_sequence; ++s)
            f += shot_rng.bernoulli(p_shot) ? 1 : 0;
        failures[job] = f;
    });
    for (std::size_t li = 0; li < run.lengths.size(); ++li) {
        BenchmarkPoint& pt = points[li];
        pt.length = run.lengths[li];
        pt.sequences = run.sequences_per_length;
        pt.trials = run.sequences_per_length * run.shots_per_sequence;
        for (std::size_t si = 0; si < run.sequences_per_length; ++si)
            pt.failures += failures[li * run.sequences_per_length + si];
    }
    return points;
}

EpgFit fit_epg(const std::vector<BenchmarkPoint>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("fit_epg: need at least two lengths");
    std::vector<double> x, y, w;
    for (const auto& p : points) {
        if (p.trials == 0)
            throw std::invalid_argument("fit_epg: point with zero trials");
        x.push_back(static_cast<double>(p.length));
        y.push_back(static_cast<double>(p.failures) / static_cast<double>(p.trials));
        w.push_back(1.0);
    }
    LineFit fit;
    for (int iter = 0; iter < 3; ++iter) {
        fit = weighted_line_fit(x, y, w);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double n = static_cast<double>(points[i].trials);
            const double pm =
                std::clamp(fit.intercept + fit.slope * x[i], 0.5 / n, 0.5);
            w[i] = n / (pm * (1.0 - pm));
        }
    }
    fit = weighted_line_fit(x, y, w);
    EpgFit out;
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.slope_uncertainty = fit.slope_sigma;
    out.intercept_uncertainty = fit.intercept_sigma;
    out.reduced_chi2 = fit.chi2_reduced;
    return out;
}

namespace {

template <typename SimFn>
double mean_epg_impl(const SequenceSet& set, SimFn&& sim) {
    std::vector<double> fails(set.n_sequences);
    parallel_for(set.n_sequences, set.threads, [&](std::size_t i) {
        const GateSequence seq = generate_sequence(set.length, sequence_seed(set.seed, 0, i));
        fails[i] = sim(compile_sequence(seq));
    });
    double total = 0.0;
    for (double f : fails)
        total += f;
    return total / static_cast<double>(set.n_sequences) / static_cast<double>(set.length);
}

}  // namespace

double mean_epg(const SequenceSet& set, const PulseTimings& t, const ErrorModel& m) {
    return mean_epg_impl(set, [&](const CompiledSequence& c) { return simulate_sequence(c, t, m); });
}

double mean_epg_16(const SequenceSet& set, const PulseTimings& t, const ErrorModel& m,
                   const ManifoldContext& ctx) {
    return mean_epg_impl(set,
                         [&](const CompiledSequence& c) { return simulate_sequence_16(c, t, m, ctx); });
}

std::vector<ScanPoint> scan_epg_vs_detuning(const std::vector<double>& detunings_hz,
                                            const SequenceSet& set, const PulseTimings& t,
                                            const ErrorModel& base) {
    std::vector<ScanPoint> out;
    out.reserve(detunings_hz.size());
    for (double d : detunings_hz) {
        ErrorModel m = base;
        m.detuning_hz = d;
        ScanPoint p;
        p.x = d;
        m.dead_time = true;
        p.epg_primary = mean_epg(set, t, m);
        m.dead_time = false;
        p.epg_secondary = mean_epg(set, t, m);
        out.push_back(p);
    }
    return out;
}

std::vector<ScanPoint> scan_epg_vs_pulse_area(const std::vector<double>& rabi_offsets,
                                              double detuning_secondary_hz,
                                              const SequenceSet& set, const PulseTimings& t,
                                              const ErrorModel& base) {
    std::vector<ScanPoint> out;
    out.reserve(rabi_offsets.size());
    for (double off : rabi_offsets) {
        ErrorModel m = base;
        m.rabi_offset = off;
        ScanPoint p;
        p.x = off;
        m.detuning_hz = 0.0;
        p.epg_primary = mean_epg(set, t, m);
        m.detuning_hz = detuning_secondary_hz;
        p.epg_secondary = mean_epg(set, t, m);
        out.push_back(p);
    }
    return out;
}

double off_resonant_epg(const SequenceSet& set, const PulseTimings& t, const ErrorModel& m,
                        const ManifoldContext& ctx) {
    ErrorModel matched = m;
    matched.ac_zeeman_hz = 0.0;  // the 16-level path contains the shift physically
    return mean_epg_16(set, t, matched, ctx) - mean_epg(set, t, matched);
}

SamplingDistribution sampling_distribution(std::size_t n_sets, std::size_t set_size,
                                           std::size_t length, const PulseTimings& t,
                                           const ErrorModel& m, uint64_t seed, unsigned threads) {
    SamplingDistribution out;
    out.epg_samples.resize(n_sets);
    const std::size_t n_jobs = n_sets * set_size;
    std::vector<double> fails(n_jobs);
    parallel_for(n_jobs, threads, [&](std::size_t job) {
        const std::size_t set_i = job / set_size;
        const std::size_t seq_i = job % set_size;
        const GateSequence seq = generate_sequence(length, sequence_seed(seed, set_i + 1, seq_i));
        fails[job] = simulate_sequence(compile_sequence(seq), t, m);
    });
    for (std::size_t i = 0; i < n_sets; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < set_size; ++j)
            total += fails[i * set_size + j];
        out.epg_samples[i] =
            total / static_cast<double>(set_size) / static_cast<double>(length);
    }
    const MeanStd ms = mean_std(out.epg_samples);
    out.mu = ms.mean;
    out.sigma = ms.std;
    return out;
}

}  // namespace ionsim
