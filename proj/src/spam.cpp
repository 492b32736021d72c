#include "ionsim/spam.hpp"

#include "ionsim/constants.hpp"
#include "ionsim/manifold.hpp"
#include "ionsim/threading.hpp"

#include <cmath>
#include <stdexcept>

namespace ionsim {

namespace {

const std::array<HyperfineState, 5>& transfer_chain() {
    static const std::array<HyperfineState, 5> chain{
        HyperfineState{4, 4}, HyperfineState{3, 3}, HyperfineState{4, 2},
        HyperfineState{3, 1}, HyperfineState{4, 0}};
    return chain;
}

}  // namespace

void PumpingModel::validate() const {
    if (!(leakage >= 0.0) || leakage >= 1.0)
        throw std::invalid_argument("pumping: leakage must be in [0,1)");
    if (repetitions < 0)
        throw std::invalid_argument("pumping: repetitions must be >= 0");
    if (!(pi_pulse_error >= 0.0) || pi_pulse_error > 1.0)
        throw std::invalid_argument("pumping: pi_pulse_error must be in [0,1]");
    if (!(leak_split_m3 >= 0.0) || leak_split_m3 > 1.0)
        throw std::invalid_argument("pumping: leak_split_m3 must be in [0,1]");
}

std::array<double, 16> simulate_pumping(const PumpingModel& m) {
    m.validate();
    std::array<double, 16> pop{};
    const int i44 = state_index({4, 4});
    const int i43 = state_index({4, 3});
    const int i42 = state_index({4, 2});
    const int i33 = state_index({3, 3});
    const int i32 = state_index({3, 2});

    // initial sigma+ pumping pass; the F=3 clear-out leaves the leak in F=4
    pop[i44] = 1.0 - m.leakage;
    pop[i43] = m.leakage * m.leak_split_m3;
    pop[i42] = m.leakage * (1.0 - m.leak_split_m3);

    for (int cycle = 0; cycle < m.repetitions; ++cycle) {
        // pi-pulses move the leak pools to F=3
        const double moved43 = pop[i43] * (1.0 - m.pi_pulse_error);
        const double moved42 = pop[i42] * (1.0 - m.pi_pulse_error);
        pop[i43] -= moved43;
        pop[i42] -= moved42;
        pop[i33] += moved43;
        pop[i32] += moved42;
        // clear-out pulse re-pumps all F=3 population
        double f3 = 0.0;
        for (const HyperfineState& s : all_states()) {
            if (s.f == 3) {
                f3 += pop[state_index(s)];
                pop[state_index(s)] = 0.0;
            }
        }
        pop[i44] += f3 * (1.0 - m.leakage);
        pop[i43] += f3 * m.leakage * m.leak_split_m3;
        pop[i42] += f3 * m.leakage * (1.0 - m.leak_split_m3);
    }
    return pop;
}

double pumping_residual(const PumpingModel& m) {
    const auto pop = simulate_pumping(m);
    return 1.0 - pop[state_index(stretch_state())];
}

double pumping_residual_closed_form(const PumpingModel& m) {
    m.validate();
    // every cycle recaptures all but a factor g of the leaked population
    const double g = m.pi_pulse_error + (1.0 - m.pi_pulse_error) * m.leakage;
    return m.leakage * std::pow(g, m.repetitions);
}

void ShelvingModel::validate() const {
    const double stretch = shelve_prob[state_index(stretch_state())];
    for (const HyperfineState& s : all_states()) {
        const double p = shelve_prob[state_index(s)];
        if (!(p >= 0.0) || p > 1.0)
            throw std::invalid_argument("shelving: probabilities must be in [0,1]");
        if (p > stretch + 1e-12)
            throw std::invalid_argument("shelving: stretch state must have the maximum probability");
    }
}

namespace {

ShelvingModel make_shelving(double stretch_error) {
    ShelvingModel m;
    for (const HyperfineState& s : all_states()) {
        double p = 0.25;          // Zeeman-resolved spectators, <= 30% shelved
        if (s.f == 3)
            p = 3e-5;             // far off resonance from the 393 nm transfer
        if (s == stretch_state())
            p = 1.0 - stretch_error;
        m.shelve_prob[state_index(s)] = p;
    }
    return m;
}

}  // namespace

ShelvingModel ShelvingModel::ideal() { return make_shelving(1.0e-4); }
ShelvingModel ShelvingModel::broadened() { return make_shelving(1.7e-4); }

double shelving_error(const ShelvingModel& m, const HyperfineState& entering) {
    m.validate();
    const double p = m.shelve_prob[state_index(entering)];
    return entering == stretch_state() ? 1.0 - p : p;
}

double transfer_chain_error(int n_pulses, double per_pulse_error) {
    if (n_pulses < 0 || per_pulse_error < 0.0 || per_pulse_error > 1.0)
        throw std::invalid_argument("transfer_chain_error: bad arguments");
    double ok = 1.0;
    for (int i = 0; i < n_pulses; ++i)
        ok *= 1.0 - per_pulse_error;
    return 1.0 - ok;
}

std::vector<double> transfer_pulse_errors_detailed(const TransferDetail& d, int n_pulses) {
    if (n_pulses < 1 || n_pulses > 4)
        throw std::invalid_argument("transfer chain has 1..4 pulses");
    // Gauss-Hermite nodes for exp(-x^2): field offsets sqrt(2) sigma x_k
    static const double nodes[5] = {-2.0201828704560856, -0.9585724646138185, 0.0,
                                    0.9585724646138185, 2.0201828704560856};
    static const double weights[5] = {0.019953242059045913, 0.3936193231522412,
                                      0.9453087204829419, 0.3936193231522412,
                                      0.019953242059045913};
    static const double sqrt_pi = std::sqrt(kPi);

    std::vector<double> errors;
    const auto& chain = transfer_chain();
    for (int k = 0; k < n_pulses; ++k) {
        const HyperfineState src = chain[k];
        const HyperfineState dst = chain[k + 1];
        const double f_nominal = transition_frequency(src, dst, d.b, d.constants);
        const double coupling = std::abs(coupling_strength(src, dst, d.pol));
        if (coupling == 0.0)
            throw std::logic_error("transfer transition has zero coupling");
        const double omega_t = kPi / d.pi_time_s;  // pi pulse on this transition
        ManifoldDrive drive;
        drive.frequency_hz = f_nominal;
        drive.qubit_rabi_rad = omega_t * d.pol.sigma_plus / coupling;
        drive.pol = d.pol;
        double err = 0.0;
        for (int q = 0; q < 5; ++q) {
            const FieldPoint b{d.b.gauss + std::sqrt(2.0) * d.field_noise_gauss * nodes[q]};
            ManifoldEngine engine(drive, b, d.constants);
            const Mat16 u = engine.pulse(0.0, d.pi_time_s);
            const double p_transfer = std::norm(u(state_index(dst), state_index(src)));
            err += weights[q] / sqrt_pi * (1.0 - p_transfer);
        }
        errors.push_back(err);
    }
    return errors;
}

double transfer_chain_error_detailed(const TransferDetail& d, int n_pulses) {
    double ok = 1.0;
    for (double e : transfer_pulse_errors_detailed(d, n_pulses))
        ok *= 1.0 - e;
    return 1.0 - ok;
}

namespace {

struct SideModel {
    double p_prep;
    double p_in;
    double p_out;
    double p_shelve;
    bool intended_dark;
};

SideModel side_model(const SpamConfig& cfg, bool up_side) {
    SideModel s;
    s.p_prep = pumping_residual(cfg.pumping);
    if (cfg.stretch_only) {
        s.p_in = 0.0;
        s.p_out = 0.0;
        s.p_shelve = shelving_error(cfg.shelving, stretch_state());
        s.intended_dark = true;  // the stretch state is shelved and reads dark
        return s;
    }
    s.p_in = transfer_chain_error(up_side ? cfg.pulses_in_up : cfg.pulses_in_down,
                                  cfg.transfer_per_pulse_error);
    s.p_out = transfer_chain_error(cfg.pulses_out, cfg.transfer_per_pulse_error);
    if (up_side) {
        s.p_shelve = shelving_error(cfg.shelving, stretch_state());
    } else {
        s.p_shelve = cfg.wrong_shelve_down > 0.0
                         ? cfg.wrong_shelve_down
                         : cfg.shelving.shelve_prob[state_index(qubit_up())];
    }
    s.intended_dark = up_side;
    return s;
}

double path_failure(const SideModel& s) {
    return 1.0 - (1.0 - s.p_prep) * (1.0 - s.p_in) * (1.0 - s.p_out) * (1.0 - s.p_shelve);
}

double side_error_analytic(const SideModel& s, const SideErrors& det) {
    const double p_fail = path_failure(s);
    const double det_intended = s.intended_dark ? det.dark_error : det.bright_error;
    const double det_flipped = s.intended_dark ? det.bright_error : det.dark_error;
    return (1.0 - p_fail) * det_intended + p_fail * (1.0 - det_flipped);
}

}  // namespace

SpamBudget spam_budget(const SpamConfig& cfg, const SideErrors& detection_errors) {
    SpamBudget b;
    b.prep_stretch = pumping_residual(cfg.pumping);
    b.transfer_in = cfg.stretch_only
                        ? 0.0
                        : 0.5 * (transfer_chain_error(cfg.pulses_in_up, cfg.transfer_per_pulse_error) +
                                 transfer_chain_error(cfg.pulses_in_down, cfg.transfer_per_pulse_error));
    b.transfer_out =
        cfg.stretch_only ? 0.0 : transfer_chain_error(cfg.pulses_out, cfg.transfer_per_pulse_error);
    b.shelving = shelving_error(cfg.shelving, stretch_state());
    b.detection = detection_errors.mean();
    if (cfg.stretch_only) {
        b.combined = side_error_analytic(side_model(cfg, true), detection_errors);
    } else {
        b.combined = 0.5 * (side_error_analytic(side_model(cfg, true), detection_errors) +
                            side_error_analytic(side_model(cfg, false), detection_errors));
    }
    return b;
}

SpamResult spam_experiment(const SpamConfig& cfg, std::size_t shots_per_state, uint64_t seed,
                           unsigned threads) {
    if (shots_per_state == 0)
        throw std::invalid_argument("spam_experiment: shots must be > 0");
    cfg.detection.validate();
    cfg.shelving.validate();

    const SideModel sides[2] = {side_model(cfg, false), side_model(cfg, true)};
    const bool run_down_side = !cfg.stretch_only;

    const unsigned shards = std::max(1u, std::min<unsigned>(threads * 4, 64));
    std::vector<std::size_t> err_up(shards, 0), err_down(shards, 0);
    parallel_for(shards, threads, [&](std::size_t shard) {
        Rng rng(seed, 0x5a5a, shard);
        const std::size_t lo = shots_per_state * shard / shards;
        const std::size_t hi = shots_per_state * (shard + 1) / shards;
        for (std::size_t i = lo; i < hi; ++i) {
            for (int side = run_down_side ? 0 : 1; side < 2; ++side) {
                const SideModel& s = sides[side];
                bool ok = !rng.bernoulli(s.p_prep);
                if (ok && s.p_in > 0.0)
                    ok = !rng.bernoulli(s.p_in);
                if (ok && s.p_out > 0.0)
                    ok = !rng.bernoulli(s.p_out);
                if (ok && s.p_shelve > 0.0)
                    ok = !rng.bernoulli(s.p_shelve);
                const bool truth_dark = ok ? s.intended_dark : !s.intended_dark;
                const PhotonTrace trace = simulate_trace(truth_dark, cfg.detection, rng);
                const bool measured_up = classify(trace, cfg.detection).up;
                if (measured_up != s.intended_dark)
                    (side == 1 ? err_up[shard] : err_down[shard]) += 1;
            }
        }
    });
    std::size_t eu = 0, ed = 0;
    for (unsigned s = 0; s < shards; ++s) {
        eu += err_up[s];
        ed += err_down[s];
    }
    SpamResult out;
    out.shots_per_state = shots_per_state;
    const double n = static_cast<double>(shots_per_state);
    out.error_up = eu / n;
    out.error_down = run_down_side ? ed / n : 0.0;
    const double total_shots = run_down_side ? 2.0 * n : n;
    out.measured_combined = (eu + ed) / total_shots;
    out.measured_sigma =
        std::sqrt(std::max(out.measured_combined * (1.0 - out.measured_combined), 1.0 / total_shots) /
                  total_shots);
    const DetectionBudget det = detection_error_budget(cfg.detection, std::min<std::size_t>(shots_per_state, 200000),
                                                       seed + 1, threads);
    out.budget = spam_budget(cfg, det.errors);
    return out;
}

}  // namespace ionsim
