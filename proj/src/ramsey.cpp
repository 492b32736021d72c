#include "ionsim/ramsey.hpp"

#include "ionsim/constants.hpp"
#include "ionsim/fitting.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ionsim {

void NoiseModel::validate() const {
    if (lo_fractional_instability < 0.0 || field_sigma_gauss < 0.0 || contrast_floor < 0.0 ||
        contrast_floor > 1.0)
        throw std::invalid_argument("noise model: parameters must be >= 0, floor in [0,1]");
}

void RamseyConfig::validate() const {
    if (!(free_precession_s >= 0.0))
        throw std::invalid_argument("ramsey: free precession must be >= 0");
    if (phase_points_rad.size() < 4)
        throw std::invalid_argument("ramsey: need >= 4 phase points for contrast fitting");
    if (shots_per_point == 0)
        throw std::invalid_argument("ramsey: shots_per_point must be > 0");
    noise.validate();
}

std::vector<double> RamseyConfig::default_phases(std::size_t n) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i)
        p[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    return p;
}

RamseyFringe ramsey_fringe(const RamseyConfig& cfg, const FieldTrajectory& b_of_t,
                           const AtomicConstants& c, Rng& rng) {
    cfg.validate();
    const FieldPoint b0 = field_independent_point(qubit_down(), qubit_up(), c, {100.0, 200.0});
    const double f0 = transition_frequency(qubit_down(), qubit_up(), b0, c);
    const double half_curvature =
        0.5 * transition_frequency_curvature(qubit_down(), qubit_up(), b0, c);
    const double phase_diffusion =
        std::pow(kTwoPi * f0 * cfg.noise.lo_fractional_instability, 2.0);  // rad^2 per (s of t_R)

    RamseyFringe out;
    out.phases_rad = cfg.phase_points_rad;
    out.p_excite.resize(cfg.phase_points_rad.size());
    double t_abs = 0.0;
    for (std::size_t k = 0; k < cfg.phase_points_rad.size(); ++k) {
        std::size_t excited = 0;
        for (std::size_t s = 0; s < cfg.shots_per_point; ++s) {
            const double delta_b = b_of_t(t_abs) - b0.gauss + cfg.noise.field_sigma_gauss * rng.normal();
            const double f_offset = half_curvature * delta_b * delta_b;  // parabola around B0
            double phi = kTwoPi * (cfg.lo_detuning_hz - f_offset) * cfg.free_precession_s;
            if (phase_diffusion > 0.0)
                phi += std::sqrt(phase_diffusion * cfg.free_precession_s) * rng.normal();
            const double p_up =
                0.5 * (1.0 + (1.0 - cfg.noise.contrast_floor) *
                                 std::cos(phi - cfg.phase_points_rad[k]));
            excited += rng.bernoulli(p_up) ? 1 : 0;
            t_abs += cfg.free_precession_s;
        }
        out.p_excite[k] =
            static_cast<double>(excited) / static_cast<double>(cfg.shots_per_point);
    }
    const SinusoidFit fit = sinusoid_fit(out.phases_rad, out.p_excite);
    out.contrast = fit.offset > 0.0 ? std::min(fit.amplitude / fit.offset, 1.0) : 0.0;
    out.fringe_phase_rad = fit.phase;
    return out;
}

CoherenceFit fit_contrast_decay(const std::vector<ContrastPoint>& points) {
    std::vector<double> x, y, w;
    for (const auto& p : points) {
        if (p.contrast <= 0.0)
            continue;  // log-domain fit; zero-contrast points carry no information here
        x.push_back(p.t_r_s);
        y.push_back(std::log(p.contrast));
        const double sigma = p.sigma > 0.0 ? p.sigma / p.contrast : 1e-2;
        w.push_back(1.0 / (sigma * sigma));
    }
    if (x.size() < 2)
        throw std::invalid_argument("fit_contrast_decay: need >= 2 usable points");
    const LineFit fit = weighted_line_fit(x, y, w);
    CoherenceFit out;
    out.contrast0 = std::exp(fit.intercept);
    const double rate = -fit.slope;  // 1 / T2*
    if (rate <= 0.0 || !std::isfinite(rate)) {
        out.t2_star_s = std::numeric_limits<double>::infinity();
        out.uncertainty_s = std::numeric_limits<double>::infinity();
        return out;
    }
    out.t2_star_s = 1.0 / rate;
    out.uncertainty_s = fit.slope_sigma / (rate * rate);
    return out;
}

std::vector<ClockScanPoint> clock_scan(const std::vector<double>& b_gauss,
                                       const AtomicConstants& c) {
    std::vector<ClockScanPoint> out;
    out.reserve(b_gauss.size());
    for (double b : b_gauss)
        out.push_back({b, transition_frequency(qubit_down(), qubit_up(), {b}, c)});
    return out;
}

std::vector<ServoSample> field_servo(const ServoConfig& cfg, const FieldTrajectory& b_drift,
                                     const AtomicConstants& c, Rng& rng) {
    if (!(cfg.period_s > 0.0) || !(cfg.duration_s > 0.0) || !(cfg.gain > 0.0))
        throw std::invalid_argument("field_servo: period, duration and gain must be > 0");
    const FieldPoint b0{cfg.b0_gauss};
    const double sensitivity = transition_frequency_derivative(cfg.probe_a, cfg.probe_b, b0, c);
    if (std::abs(sensitivity) < 1e3)
        throw std::invalid_argument("field_servo: probe transition has no field sensitivity");
    const double f_probe_b0 = transition_frequency(cfg.probe_a, cfg.probe_b, b0, c);

    std::vector<ServoSample> out;
    double correction = 0.0;
    for (double t = 0.0; t <= cfg.duration_s; t += cfg.period_s) {
        const double b_actual = b_drift(t) + correction;
        const double f_meas = transition_frequency(cfg.probe_a, cfg.probe_b, {b_actual}, c) +
                              cfg.measurement_sigma_hz * rng.normal();
        const double b_est = cfg.b0_gauss + (f_meas - f_probe_b0) / sensitivity;
        correction -= cfg.gain * (b_est - cfg.b0_gauss);
        const double b_after = b_drift(t) + correction;
        out.push_back({t, std::abs(b_after - cfg.b0_gauss)});
    }
    return out;
}

}  // namespace ionsim
