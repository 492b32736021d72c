#include "ionsim/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ionsim {

using nlohmann::json;

FieldPoint RunConfig::clock_field() const {
    return field_independent_point(qubit_down(), qubit_up(), constants, {100.0, 200.0});
}

double RunConfig::qubit_frequency(FieldPoint b) const {
    return transition_frequency(qubit_down(), qubit_up(), b, constants);
}

double RunConfig::calibrated_ac_zeeman_hz() const {
    DriveSpec drive{timings.nominal_rabi_rad(), pol};
    return ac_zeeman_shift(qubit_down(), qubit_up(), drive, clock_field(), constants);
}

ErrorModel RunConfig::error_model() const {
    ErrorModel m;
    m.detuning_hz = benchmark.detuning_hz;
    m.ac_zeeman_hz = calibrated_ac_zeeman_hz();
    m.rabi_offset = benchmark.rabi_offset;
    m.dead_time = benchmark.dead_time;
    m.depolarizing_per_gate = benchmark.depolarizing_per_gate;
    return m;
}

ManifoldContext RunConfig::manifold_context() const {
    ManifoldContext ctx;
    ctx.b = clock_field();
    ctx.constants = constants;
    ctx.pol = pol;
    return ctx;
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.spam.detection = cfg.detection;
    return cfg;
}

namespace {

template <typename T>
void get_to(const json& j, const char* key, T& out) {
    if (j.contains(key))
        j.at(key).get_to(out);
}

json shelving_to_json(const ShelvingModel& m) {
    json j = json::object();
    for (const HyperfineState& s : all_states()) {
        const std::string key = std::to_string(s.f) + "," + std::to_string(s.m);
        j[key] = m.shelve_prob[state_index(s)];
    }
    return j;
}

ShelvingModel shelving_from_json(const json& j, const ShelvingModel& fallback) {
    if (j.is_string()) {
        const std::string preset = j.get<std::string>();
        if (preset == "ideal")
            return ShelvingModel::ideal();
        if (preset == "broadened")
            return ShelvingModel::broadened();
        throw std::invalid_argument("spam.shelving: unknown preset '" + preset + "'");
    }
    ShelvingModel m = fallback;
    for (auto it = j.begin(); it != j.end(); ++it) {
        int f = 0, mm = 0;
        if (std::sscanf(it.key().c_str(), "%d,%d", &f, &mm) != 2)
            throw std::invalid_argument("spam.shelving: bad state key '" + it.key() + "'");
        m.shelve_prob[state_index({f, mm})] = it.value().get<double>();
    }
    return m;
}

}  // namespace

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg = default_config();
    if (j.contains("constants")) {
        const json& c = j["constants"];
        get_to(c, "zero_field_splitting_hz", cfg.constants.zero_field_splitting_hz);
        get_to(c, "nuclear_moment", cfg.constants.nuclear_moment);
        get_to(c, "electron_g_factor", cfg.constants.electron_g_factor);
    }
    if (j.contains("polarization")) {
        const json& p = j["polarization"];
        get_to(p, "sigma_minus", cfg.pol.sigma_minus);
        get_to(p, "pi", cfg.pol.pi);
        get_to(p, "sigma_plus", cfg.pol.sigma_plus);
    }
    if (j.contains("drive")) {
        const json& d = j["drive"];
        get_to(d, "pi2_time_s", cfg.timings.pi2_time_s);
        get_to(d, "dead_time_s", cfg.timings.dead_time_s);
        get_to(d, "trap_rf_shift_hz", cfg.trap_rf_shift_hz);
    }
    if (j.contains("benchmark")) {
        const json& b = j["benchmark"];
        get_to(b, "lengths", cfg.benchmark.lengths);
        get_to(b, "sequences_per_length", cfg.benchmark.sequences_per_length);
        get_to(b, "shots_per_sequence", cfg.benchmark.shots_per_sequence);
        get_to(b, "detuning_hz", cfg.benchmark.detuning_hz);
        get_to(b, "rabi_offset", cfg.benchmark.rabi_offset);
        get_to(b, "dead_time", cfg.benchmark.dead_time);
        get_to(b, "use_16_level", cfg.benchmark.use_16_level);
        get_to(b, "depolarizing_per_gate", cfg.benchmark.depolarizing_per_gate);
        get_to(b, "spam_error", cfg.benchmark.spam_error);
        get_to(b, "scan_set_size", cfg.benchmark.scan_set_size);
        get_to(b, "scan_length", cfg.benchmark.scan_length);
        get_to(b, "sampling_sets", cfg.benchmark.sampling_sets);
    }
    if (j.contains("detection")) {
        const json& d = j["detection"];
        get_to(d, "bright_rate_hz", cfg.detection.bright_rate_hz);
        get_to(d, "dark_rate_hz", cfg.detection.dark_rate_hz);
        get_to(d, "shelf_lifetime_s", cfg.detection.shelf_lifetime_s);
        get_to(d, "detection_duration_s", cfg.detection.detection_duration_s);
        get_to(d, "bin_width_s", cfg.detection.bin_width_s);
        cfg.spam.detection = cfg.detection;
    }
    if (j.contains("spam")) {
        const json& s = j["spam"];
        if (s.contains("pumping")) {
            const json& p = s["pumping"];
            get_to(p, "leakage", cfg.spam.pumping.leakage);
            get_to(p, "repetitions", cfg.spam.pumping.repetitions);
            get_to(p, "pi_pulse_error", cfg.spam.pumping.pi_pulse_error);
            get_to(p, "leak_split_m3", cfg.spam.pumping.leak_split_m3);
        }
        get_to(s, "transfer_per_pulse_error", cfg.spam.transfer_per_pulse_error);
        get_to(s, "pulses_in_up", cfg.spam.pulses_in_up);
        get_to(s, "pulses_in_down", cfg.spam.pulses_in_down);
        get_to(s, "pulses_out", cfg.spam.pulses_out);
        get_to(s, "wrong_shelve_down", cfg.spam.wrong_shelve_down);
        get_to(s, "stretch_only", cfg.spam.stretch_only);
        if (s.contains("shelving"))
            cfg.spam.shelving = shelving_from_json(s["shelving"], cfg.spam.shelving);
    }
    if (j.contains("ramsey")) {
        const json& r = j["ramsey"];
        get_to(r, "t_r_grid_s", cfg.ramsey.t_r_grid_s);
        get_to(r, "phase_points", cfg.ramsey.phase_points);
        get_to(r, "shots_per_point", cfg.ramsey.shots_per_point);
        get_to(r, "lo_detuning_hz", cfg.ramsey.lo_detuning_hz);
        if (r.contains("noise")) {
            const json& n = r["noise"];
            get_to(n, "lo_fractional_instability", cfg.ramsey.noise.lo_fractional_instability);
            get_to(n, "field_sigma_gauss", cfg.ramsey.noise.field_sigma_gauss);
            get_to(n, "field_drift_gauss_per_s", cfg.ramsey.noise.field_drift_gauss_per_s);
            get_to(n, "contrast_floor", cfg.ramsey.noise.contrast_floor);
        }
    }
    if (j.contains("servo")) {
        const json& s = j["servo"];
        get_to(s, "period_s", cfg.servo.period_s);
        get_to(s, "gain", cfg.servo.gain);
        get_to(s, "measurement_sigma_hz", cfg.servo.measurement_sigma_hz);
        get_to(s, "duration_s", cfg.servo.duration_s);
    }
    if (j.contains("levels")) {
        const json& l = j["levels"];
        get_to(l, "b_min_gauss", cfg.levels.b_min_gauss);
        get_to(l, "b_max_gauss", cfg.levels.b_max_gauss);
        get_to(l, "b_step_gauss", cfg.levels.b_step_gauss);
    }
    if (j.contains("clock_scan")) {
        const json& cs = j["clock_scan"];
        get_to(cs, "b_center_gauss", cfg.clock.b_center_gauss);
        get_to(cs, "half_span_gauss", cfg.clock.half_span_gauss);
        get_to(cs, "step_gauss", cfg.clock.step_gauss);
    }
    get_to(j, "seed", cfg.seed);
    get_to(j, "output_dir", cfg.output_dir);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_to_json_text(const RunConfig& cfg) {
    json j;
    j["constants"] = {{"zero_field_splitting_hz", cfg.constants.zero_field_splitting_hz},
                      {"nuclear_moment", cfg.constants.nuclear_moment},
                      {"electron_g_factor", cfg.constants.electron_g_factor}};
    j["polarization"] = {{"sigma_minus", cfg.pol.sigma_minus},
                         {"pi", cfg.pol.pi},
                         {"sigma_plus", cfg.pol.sigma_plus}};
    j["drive"] = {{"pi2_time_s", cfg.timings.pi2_time_s},
                  {"dead_time_s", cfg.timings.dead_time_s},
                  {"trap_rf_shift_hz", cfg.trap_rf_shift_hz}};
    j["benchmark"] = {{"lengths", cfg.benchmark.lengths},
                      {"sequences_per_length", cfg.benchmark.sequences_per_length},
                      {"shots_per_sequence", cfg.benchmark.shots_per_sequence},
                      {"detuning_hz", cfg.benchmark.detuning_hz},
                      {"rabi_offset", cfg.benchmark.rabi_offset},
                      {"dead_time", cfg.benchmark.dead_time},
                      {"use_16_level", cfg.benchmark.use_16_level},
                      {"depolarizing_per_gate", cfg.benchmark.depolarizing_per_gate},
                      {"spam_error", cfg.benchmark.spam_error},
                      {"scan_set_size", cfg.benchmark.scan_set_size},
                      {"scan_length", cfg.benchmark.scan_length},
                      {"sampling_sets", cfg.benchmark.sampling_sets}};
    j["detection"] = {{"bright_rate_hz", cfg.detection.bright_rate_hz},
                      {"dark_rate_hz", cfg.detection.dark_rate_hz},
                      {"shelf_lifetime_s", cfg.detection.shelf_lifetime_s},
                      {"detection_duration_s", cfg.detection.detection_duration_s},
                      {"bin_width_s", cfg.detection.bin_width_s}};
    j["spam"] = {{"pumping",
                  {{"leakage", cfg.spam.pumping.leakage},
                   {"repetitions", cfg.spam.pumping.repetitions},
                   {"pi_pulse_error", cfg.spam.pumping.pi_pulse_error},
                   {"leak_split_m3", cfg.spam.pumping.leak_split_m3}}},
                 {"transfer_per_pulse_error", cfg.spam.transfer_per_pulse_error},
                 {"pulses_in_up", cfg.spam.pulses_in_up},
                 {"pulses_in_down", cfg.spam.pulses_in_down},
                 {"pulses_out", cfg.spam.pulses_out},
                 {"wrong_shelve_down", cfg.spam.wrong_shelve_down},
                 {"stretch_only", cfg.spam.stretch_only},
                 {"shelving", shelving_to_json(cfg.spam.shelving)}};
    j["ramsey"] = {{"t_r_grid_s", cfg.ramsey.t_r_grid_s},
                   {"phase_points", cfg.ramsey.phase_points},
                   {"shots_per_point", cfg.ramsey.shots_per_point},
                   {"lo_detuning_hz", cfg.ramsey.lo_detuning_hz},
                   {"noise",
                    {{"lo_fractional_instability", cfg.ramsey.noise.lo_fractional_instability},
                     {"field_sigma_gauss", cfg.ramsey.noise.field_sigma_gauss},
                     {"field_drift_gauss_per_s", cfg.ramsey.noise.field_drift_gauss_per_s},
                     {"contrast_floor", cfg.ramsey.noise.contrast_floor}}}};
    j["servo"] = {{"period_s", cfg.servo.period_s},
                  {"gain", cfg.servo.gain},
                  {"measurement_sigma_hz", cfg.servo.measurement_sigma_hz},
                  {"duration_s", cfg.servo.duration_s}};
    j["levels"] = {{"b_min_gauss", cfg.levels.b_min_gauss},
                   {"b_max_gauss", cfg.levels.b_max_gauss},
                   {"b_step_gauss", cfg.levels.b_step_gauss}};
    j["clock_scan"] = {{"b_center_gauss", cfg.clock.b_center_gauss},
                       {"half_span_gauss", cfg.clock.half_span_gauss},
                       {"step_gauss", cfg.clock.step_gauss}};
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2) + "\n";
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write config file: " + path);
    out << config_to_json_text(cfg);
}

namespace {

void check(std::vector<std::string>& out, bool ok, const std::string& path,
           const std::string& message) {
    if (!ok)
        out.push_back(path + ": " + message);
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& cfg) {
    std::vector<std::string> v;
    check(v, cfg.constants.zero_field_splitting_hz > 0, "constants.zero_field_splitting_hz",
          "must be > 0");
    check(v, cfg.constants.electron_g_factor > 0, "constants.electron_g_factor", "must be > 0");
    check(v, cfg.pol.sigma_plus > 0, "polarization.sigma_plus", "must be > 0 (qubit drive)");
    check(v, cfg.pol.sigma_minus >= 0 && cfg.pol.pi >= 0, "polarization",
          "weights must be >= 0");
    check(v, cfg.timings.pi2_time_s > 0, "drive.pi2_time_s", "must be > 0");
    check(v, cfg.timings.dead_time_s >= 0, "drive.dead_time_s", "must be >= 0");
    check(v, !cfg.benchmark.lengths.empty(), "benchmark.lengths", "must be non-empty");
    for (std::size_t L : cfg.benchmark.lengths)
        check(v, L >= 1, "benchmark.lengths", "lengths must be >= 1");
    check(v, cfg.benchmark.sequences_per_length >= 1, "benchmark.sequences_per_length",
          "must be >= 1");
    check(v, cfg.benchmark.shots_per_sequence >= 1, "benchmark.shots_per_sequence",
          "must be >= 1");
    check(v, cfg.benchmark.spam_error >= 0 && cfg.benchmark.spam_error < 1,
          "benchmark.spam_error", "must be in [0,1)");
    check(v, cfg.benchmark.rabi_offset > -1.0, "benchmark.rabi_offset", "must be > -1");

    try {
        cfg.detection.validate();
    } catch (const std::exception& e) {
        v.push_back(std::string("detection: ") + e.what());
    }
    try {
        cfg.spam.pumping.validate();
    } catch (const std::exception& e) {
        v.push_back(std::string("spam.pumping: ") + e.what());
    }
    try {
        cfg.spam.shelving.validate();
    } catch (const std::exception& e) {
        v.push_back(std::string("spam.shelving: ") + e.what());
    }
    check(v,
          cfg.spam.transfer_per_pulse_error >= 0 && cfg.spam.transfer_per_pulse_error <= 1,
          "spam.transfer_per_pulse_error", "must be in [0,1]");
    check(v, cfg.spam.pulses_in_up == 3 || cfg.spam.pulses_in_up == 4, "spam.pulses_in_up",
          "must be 3 or 4");
    check(v, cfg.spam.pulses_in_down == 3 || cfg.spam.pulses_in_down == 4,
          "spam.pulses_in_down", "must be 3 or 4");
    check(v, cfg.spam.pulses_out >= 1 && cfg.spam.pulses_out <= 4, "spam.pulses_out",
          "must be in 1..4");

    for (double t : cfg.ramsey.t_r_grid_s)
        check(v, t >= 0, "ramsey.t_r_grid_s", "free precession times must be >= 0");
    check(v, cfg.ramsey.phase_points >= 4, "ramsey.phase_points",
          "need >= 4 phase points for contrast fitting");
    check(v, cfg.ramsey.shots_per_point >= 1, "ramsey.shots_per_point", "must be >= 1");
    try {
        cfg.ramsey.noise.validate();
    } catch (const std::exception& e) {
        v.push_back(std::string("ramsey.noise: ") + e.what());
    }
    check(v, cfg.servo.period_s > 0, "servo.period_s", "must be > 0");
    check(v, cfg.servo.gain > 0 && cfg.servo.gain <= 2, "servo.gain",
          "must be in (0,2] for loop stability");
    check(v, cfg.levels.b_step_gauss > 0, "levels.b_step_gauss", "must be > 0");
    check(v, cfg.levels.b_max_gauss > cfg.levels.b_min_gauss, "levels.b_max_gauss",
          "must exceed b_min_gauss");
    check(v, cfg.levels.b_min_gauss >= 0, "levels.b_min_gauss", "must be >= 0");
    check(v, cfg.clock.step_gauss > 0, "clock_scan.step_gauss", "must be > 0");
    check(v, cfg.clock.half_span_gauss > 0, "clock_scan.half_span_gauss", "must be > 0");
    return v;
}

std::string config_hash(const RunConfig& cfg) {
    const std::string text = config_to_json_text(cfg);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ionsim
