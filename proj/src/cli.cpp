#include "ionsim/cli.hpp"

#include "ionsim/config.hpp"
#include "ionsim/constants.hpp"
#include "ionsim/fitting.hpp"
#include "ionsim/io.hpp"
#include "ionsim/threading.hpp"
#include "ionsim/version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ionsim {

using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
};

RunConfig resolve_config(const GlobalOpts& g) {
    RunConfig cfg = g.config_path.empty() ? default_config() : load_config(g.config_path);
    if (g.seed_set)
        cfg.seed = g.seed;
    if (!g.out_dir.empty())
        cfg.output_dir = g.out_dir;
    const auto violations = validate_config(cfg);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invalid config:";
        for (const auto& v : violations)
            msg << "\n  " << v;
        throw std::invalid_argument(msg.str());
    }
    return cfg;
}

unsigned resolve_threads(const GlobalOpts& g) {
    return g.threads == 0 ? default_threads() : g.threads;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    namespace fs = std::filesystem;
    fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    return (dir / name).string();
}

std::vector<std::pair<std::string, std::string>> metadata(const RunConfig& cfg) {
    return {{"tool", std::string("ionsim ") + kVersion},
            {"config_hash", config_hash(cfg)},
            {"seed", std::to_string(cfg.seed)}};
}

void write_json(const RunConfig& cfg, const std::string& name, json j) {
    j["meta"] = {{"tool", std::string("ionsim ") + kVersion},
                 {"config_hash", config_hash(cfg)},
                 {"seed", cfg.seed}};
    write_text_file(out_path(cfg, name), j.dump(2) + "\n");
}

int cmd_levels(const RunConfig& cfg) {
    CsvWriter csv(out_path(cfg, "levels.csv"), metadata(cfg), {"F", "M", "B_gauss", "energy_hz"});
    for (double b = cfg.levels.b_min_gauss; b <= cfg.levels.b_max_gauss + 1e-9;
         b += cfg.levels.b_step_gauss) {
        for (const HyperfineState& s : all_states())
            csv.row({static_cast<double>(s.f), static_cast<double>(s.m), b,
                     state_energy(s, {b}, cfg.constants)});
    }
    csv.close();
    return 0;
}

int cmd_clock_scan(const RunConfig& cfg) {
    const FieldPoint b0 = cfg.clock_field();
    const double f0 = cfg.qubit_frequency(b0);
    std::vector<double> bs;
    for (double b = cfg.clock.b_center_gauss - cfg.clock.half_span_gauss;
         b <= cfg.clock.b_center_gauss + cfg.clock.half_span_gauss + 1e-12;
         b += cfg.clock.step_gauss)
        bs.push_back(b);
    const auto curve = clock_scan(bs, cfg.constants);
    CsvWriter csv(out_path(cfg, "clock_scan.csv"), metadata(cfg),
                  {"B_gauss", "frequency_hz", "offset_from_f0_hz"});
    for (const auto& p : curve)
        csv.row({p.b_gauss, p.frequency_hz, p.frequency_hz - f0});
    csv.close();
    json j;
    j["clock_field_gauss"] = b0.gauss;
    j["qubit_frequency_hz"] = f0;
    j["curvature_mhz_per_mg2"] =
        transition_frequency_curvature(qubit_down(), qubit_up(), b0, cfg.constants) * 1e-3;
    j["trap_rf_shift_hz"] = cfg.trap_rf_shift_hz;
    write_json(cfg, "clock_scan.json", j);
    return 0;
}

int cmd_ramsey(const RunConfig& cfg, unsigned threads) {
    const std::size_t n = cfg.ramsey.t_r_grid_s.size();
    std::vector<RamseyFringe> fringes(n);
    parallel_for(n, threads, [&](std::size_t i) {
        RamseyConfig rc;
        rc.free_precession_s = cfg.ramsey.t_r_grid_s[i];
        rc.phase_points_rad = RamseyConfig::default_phases(cfg.ramsey.phase_points);
        rc.shots_per_point = cfg.ramsey.shots_per_point;
        rc.noise = cfg.ramsey.noise;
        rc.lo_detuning_hz = cfg.ramsey.lo_detuning_hz;
        Rng rng(cfg.seed, 0x3a3a, i);
        const double drift = cfg.ramsey.noise.field_drift_gauss_per_s;
        const double b0 = cfg.clock_field().gauss;
        fringes[i] = ramsey_fringe(rc, [=](double t) { return b0 + drift * t; }, cfg.constants,
                                   rng);
    });
    std::vector<ContrastPoint> points;
    CsvWriter csv(out_path(cfg, "ramsey_contrast.csv"), metadata(cfg),
                  {"t_r_s", "contrast", "sigma"});
    for (std::size_t i = 0; i < n; ++i) {
        ContrastPoint p;
        p.t_r_s = cfg.ramsey.t_r_grid_s[i];
        p.contrast = fringes[i].contrast;
        const double shots = static_cast<double>(cfg.ramsey.shots_per_point *
                                                 cfg.ramsey.phase_points);
        p.sigma = std::sqrt(2.0 / shots);  // sinusoid-amplitude noise scale
        points.push_back(p);
        csv.row({p.t_r_s, p.contrast, p.sigma});
    }
    csv.close();
    const CoherenceFit fit = fit_contrast_decay(points);
    json j;
    j["t2_star_s"] = std::isfinite(fit.t2_star_s) ? json(fit.t2_star_s) : json("inf");
    j["uncertainty_s"] = std::isfinite(fit.uncertainty_s) ? json(fit.uncertainty_s) : json("inf");
    j["contrast0"] = fit.contrast0;
    j["note"] = "noise model is calibrated to reproduce the measured coherence, not predicted";
    write_json(cfg, "ramsey_fit.json", j);
    return 0;
}

int cmd_benchmark(const RunConfig& cfg, unsigned threads) {
    BenchmarkRun run;
    run.lengths = cfg.benchmark.lengths;
    run.sequences_per_length = cfg.benchmark.sequences_per_length;
    run.shots_per_sequence = cfg.benchmark.shots_per_sequence;
    run.spam_error = cfg.benchmark.spam_error;
    run.seed = cfg.seed;
    run.threads = threads;
    const auto points = run_benchmark(run, cfg.timings, cfg.error_model());
    CsvWriter csv(out_path(cfg, "benchmark.csv"), metadata(cfg),
                  {"length", "trials", "failures", "error", "sigma"});
    for (const auto& p : points) {
        const double err = static_cast<double>(p.failures) / static_cast<double>(p.trials);
        const double sig = std::sqrt(std::max(err * (1 - err), 0.25 / p.trials) / p.trials);
        csv.row({static_cast<double>(p.length), static_cast<double>(p.trials),
                 static_cast<double>(p.failures), err, sig});
    }
    csv.close();
    const EpgFit fit = fit_epg(points);
    json j;
    j["epg"] = fit.slope;
    j["epg_uncertainty"] = fit.slope_uncertainty;
    j["spam_intercept"] = fit.intercept;
    j["spam_intercept_uncertainty"] = fit.intercept_uncertainty;
    j["reduced_chi2"] = fit.reduced_chi2;
    write_json(cfg, "benchmark_fit.json", j);
    return 0;
}

int cmd_scan_detuning(const RunConfig& cfg, unsigned threads, std::vector<double> detunings) {
    if (detunings.empty())
        for (double d = -8.0; d <= 8.0 + 1e-9; d += 1.0)
            detunings.push_back(d);
    SequenceSet set{cfg.benchmark.scan_set_size, cfg.benchmark.scan_length, cfg.seed, threads};
    ErrorModel base = cfg.error_model();
    base.rabi_offset = 0.0;
    const auto curve = scan_epg_vs_detuning(detunings, set, cfg.timings, base);
    CsvWriter csv(out_path(cfg, "scan_detuning.csv"), metadata(cfg),
                  {"detuning_hz", "epg_dead_time", "epg_no_dead_time"});
    for (const auto& p : curve)
        csv.row({p.x, p.epg_primary, p.epg_secondary});
    csv.close();
    return 0;
}

int cmd_scan_area(const RunConfig& cfg, unsigned threads, std::vector<double> offsets) {
    if (offsets.empty())
        for (double o = -1e-3; o <= 1e-3 + 1e-12; o += 2.5e-4)
            offsets.push_back(o);
    SequenceSet set{cfg.benchmark.scan_set_size, cfg.benchmark.scan_length, cfg.seed, threads};
    ErrorModel base = cfg.error_model();
    const auto curve =
        scan_epg_vs_pulse_area(offsets, cfg.benchmark.detuning_hz, set, cfg.timings, base);
    CsvWriter csv(out_path(cfg, "scan_area.csv"), metadata(cfg),
                  {"rabi_offset", "epg_detuning_0", "epg_detuning_nominal"});
    for (const auto& p : curve)
        csv.row({p.x, p.epg_primary, p.epg_secondary});
    csv.close();
    return 0;
}

int cmd_sampling(const RunConfig& cfg, unsigned threads, std::size_t sets) {
    if (sets == 0)
        sets = cfg.benchmark.sampling_sets;
    ErrorModel m = cfg.error_model();
    m.ac_zeeman_hz = 0.0;  // nominal-conditions simulation, off-resonant effects neglected
    const auto dist = sampling_distribution(sets, cfg.benchmark.scan_set_size,
                                            cfg.benchmark.scan_length, cfg.timings, m, cfg.seed,
                                            threads);
    CsvWriter csv(out_path(cfg, "sampling.csv"), metadata(cfg), {"set_index", "epg"});
    for (std::size_t i = 0; i < dist.epg_samples.size(); ++i)
        csv.row({static_cast<double>(i), dist.epg_samples[i]});
    csv.close();
    json j;
    j["sets"] = sets;
    j["mu"] = dist.mu;
    j["sigma"] = dist.sigma;
    write_json(cfg, "sampling_fit.json", j);
    return 0;
}

int cmd_spam(const RunConfig& cfg, unsigned threads, std::size_t shots,
             const std::string& import_path) {
    if (!import_path.empty()) {
        std::ifstream in(import_path);
        if (!in)
            throw std::runtime_error("cannot open trace file: " + import_path);
        CsvWriter csv(out_path(cfg, "spam_imported.csv"), metadata(cfg),
                      {"shot", "log_likelihood_ratio", "decision_up"});
        std::string line;
        std::size_t shot = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#')
                continue;
            PhotonTrace trace;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                trace.bins.push_back(static_cast<uint32_t>(std::stoul(cell)));
            const Classification c = classify(trace, cfg.detection);
            csv.row({static_cast<double>(shot++), c.log_ratio(), c.up ? 1.0 : 0.0});
        }
        csv.close();
        return 0;
    }
    if (shots == 0)
        shots = 150000;
    // histogram of the log-likelihood ratio for both prepared states
    std::vector<double> llr_dark(shots), llr_bright(shots);
    const unsigned shards = std::max(1u, std::min(threads * 4, 64u));
    parallel_for(shards, threads, [&](std::size_t shard) {
        Rng rng(cfg.seed, 0x11d, shard);
        const std::size_t lo = shots * shard / shards;
        const std::size_t hi = shots * (shard + 1) / shards;
        for (std::size_t i = lo; i < hi; ++i) {
            llr_dark[i] = classify(simulate_trace(true, cfg.detection, rng), cfg.detection).log_ratio();
            llr_bright[i] =
                classify(simulate_trace(false, cfg.detection, rng), cfg.detection).log_ratio();
        }
    });
    std::size_t dark_err = 0, bright_err = 0;
    CsvWriter csv(out_path(cfg, "spam_histogram.csv"), metadata(cfg),
                  {"prepared_up", "log_likelihood_ratio"});
    for (std::size_t i = 0; i < shots; ++i) {
        csv.row({1.0, llr_dark[i]});
        csv.row({0.0, llr_bright[i]});
        dark_err += llr_dark[i] < 0.0 ? 1 : 0;
        bright_err += llr_bright[i] >= 0.0 ? 1 : 0;
    }
    csv.close();
    json j;
    j["shots_per_state"] = shots;
    j["dark_side_error"] = static_cast<double>(dark_err) / shots;
    j["bright_side_error"] = static_cast<double>(bright_err) / shots;
    j["mean_detection_error"] = 0.5 * (dark_err + bright_err) / static_cast<double>(shots);
    write_json(cfg, "spam_summary.json", j);
    return 0;
}

int cmd_spam_budget(const RunConfig& cfg, unsigned threads, std::size_t shots, bool stretch_only) {
    SpamConfig sc = cfg.spam;
    sc.detection = cfg.detection;
    sc.stretch_only = stretch_only;
    if (shots == 0)
        shots = 150000;
    const SpamResult r = spam_experiment(sc, shots, cfg.seed, threads);
    json j;
    j["budget"] = {{"prep_stretch", r.budget.prep_stretch},
                   {"transfer_in", r.budget.transfer_in},
                   {"transfer_out", r.budget.transfer_out},
                   {"shelving", r.budget.shelving},
                   {"detection", r.budget.detection},
                   {"combined", r.budget.combined}};
    j["measured_combined"] = r.measured_combined;
    j["measured_sigma"] = r.measured_sigma;
    j["error_up"] = r.error_up;
    j["error_down"] = r.error_down;
    j["shots_per_state"] = r.shots_per_state;
    j["stretch_only"] = stretch_only;
    write_json(cfg, "spam_budget.json", j);
    CsvWriter csv(out_path(cfg, "spam_budget.csv"), metadata(cfg), {"stage", "error"});
    csv.row_mixed({"prep_stretch", CsvWriter::format(r.budget.prep_stretch)});
    csv.row_mixed({"transfer_in", CsvWriter::format(r.budget.transfer_in)});
    csv.row_mixed({"transfer_out", CsvWriter::format(r.budget.transfer_out)});
    csv.row_mixed({"shelving", CsvWriter::format(r.budget.shelving)});
    csv.row_mixed({"detection", CsvWriter::format(r.budget.detection)});
    csv.row_mixed({"combined_analytic", CsvWriter::format(r.budget.combined)});
    csv.row_mixed({"combined_measured", CsvWriter::format(r.measured_combined)});
    csv.close();
    return 0;
}

int cmd_validate(const std::string& config_path) {
    RunConfig cfg;
    try {
        cfg = config_path.empty() ? default_config() : load_config(config_path);
    } catch (const std::exception& e) {
        std::cout << e.what() << "\n";
        return 1;
    }
    const auto violations = validate_config(cfg);
    if (violations.empty()) {
        std::cout << "config ok\n";
        return 0;
    }
    for (const auto& v : violations)
        std::cout << v << "\n";
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"trapped-ion qubit simulator (43Ca+ at the 146 G clock point)"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "config file (JSON)")
        ->envname("IONSIM_CONFIG");
    app.add_option("--seed", g.seed, "override the config seed")
        ->each([&](const std::string&) { g.seed_set = true; });
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
    app.add_option("--out", g.out_dir, "output directory");

    auto* levels = app.add_subcommand("levels", "state energies over a field scan (CSV)");
    auto* clock = app.add_subcommand("clock-scan", "qubit frequency vs field around the clock point");
    auto* ramsey = app.add_subcommand("ramsey", "Ramsey fringe contrast vs delay and T2* fit");
    auto* bench = app.add_subcommand("benchmark", "sampled randomized benchmarking + EPG fit");
    auto* scan_det = app.add_subcommand("scan-detuning", "expected EPG vs microwave detuning");
    auto* scan_area = app.add_subcommand("scan-area", "expected EPG vs pulse-area error");
    auto* sampling = app.add_subcommand("sampling", "EPG distribution over random sequence sets");
    auto* spam = app.add_subcommand("spam", "readout log-likelihood histograms / trace import");
    auto* budget = app.add_subcommand("spam-budget", "SPAM error budget Monte Carlo");
    auto* validate = app.add_subcommand("validate", "check the config against all invariants");

    std::vector<double> detunings, offsets;
    std::vector<std::size_t> length_set;
    double detuning_override = 0.0;
    bool detuning_override_set = false;
    double rabi_override = 0.0;
    bool rabi_override_set = false;
    std::size_t shots = 0, sets = 0;
    std::string import_path;
    bool stretch_only = false;

    scan_det->add_option("--detuning-hz", detunings, "detuning grid in Hz");
    scan_area->add_option("--rabi-offset", offsets, "fractional Rabi offsets");
    bench->add_option("--length-set", length_set, "sequence lengths");
    bench->add_option("--shots", shots, "shots per sequence");
    bench->add_option("--detuning-hz", detuning_override, "programmed detuning")
        ->each([&](const std::string&) { detuning_override_set = true; });
    bench->add_option("--rabi-offset", rabi_override, "fractional Rabi offset")
        ->each([&](const std::string&) { rabi_override_set = true; });
    sampling->add_option("--sets", sets, "number of sequence sets");
    spam->add_option("--shots", shots, "shots per prepared state");
    spam->add_option("--import-traces", import_path, "CSV of per-bin counts to classify");
    budget->add_option("--shots", shots, "shots per prepared state");
    budget->add_flag("--stretch-only", stretch_only,
                     "skip transfer pulses (stretch-state preparation test)");

    std::vector<std::string> argv_like(args.rbegin(), args.rend());
    try {
        app.parse(argv_like);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cout << e.what() << "\n";
        return 1;
    }

    try {
        if (validate->parsed())
            return cmd_validate(g.config_path);
        RunConfig cfg = resolve_config(g);
        const unsigned threads = resolve_threads(g);
        if (bench->parsed()) {
            if (!length_set.empty())
                cfg.benchmark.lengths = length_set;
            if (shots)
                cfg.benchmark.shots_per_sequence = shots;
            if (detuning_override_set)
                cfg.benchmark.detuning_hz = detuning_override;
            if (rabi_override_set)
                cfg.benchmark.rabi_offset = rabi_override;
            const auto violations = validate_config(cfg);
            if (!violations.empty())
                throw std::invalid_argument("invalid override: " + violations.front());
            return cmd_benchmark(cfg, threads);
        }
        if (levels->parsed())
            return cmd_levels(cfg);
        if (clock->parsed())
            return cmd_clock_scan(cfg);
        if (ramsey->parsed())
            return cmd_ramsey(cfg, threads);
        if (scan_det->parsed())
            return cmd_scan_detuning(cfg, threads, detunings);
        if (scan_area->parsed())
            return cmd_scan_area(cfg, threads, offsets);
        if (sampling->parsed())
            return cmd_sampling(cfg, threads, sets);
        if (spam->parsed())
            return cmd_spam(cfg, threads, shots, import_path);
        if (budget->parsed())
            return cmd_spam_budget(cfg, threads, shots, stretch_only);
        std::cout << "unknown subcommand\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cout << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << e.what() << "\n";
        return 2;
    }
}

}  // namespace ionsim
