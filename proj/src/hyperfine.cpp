#include "ionsim/hyperfine.hpp"

#include "ionsim/constants.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ionsim {

namespace {

constexpr double kI = AtomicConstants::nuclear_spin;

struct BrTerms {
    double a;      // hyperfine constant, Hz (negative for 43Ca+)
    double dw;     // 4A = signed splitting E(F=4) - E(F=3)
    double zeta;   // nuclear Zeeman energy per unit M, Hz
    double dzeta;  // d(zeta)/dB, Hz/G
    double x;      // Breit-Rabi field parameter
    double dx;     // dx/dB, 1/G
};

BrTerms br_terms(double b_gauss, const AtomicConstants& c) {
    BrTerms t;
    t.a = -c.zero_field_splitting_hz / 4.0;
    t.dw = 4.0 * t.a;
    t.dzeta = -(c.nuclear_moment / kI) * kNuclearMagnetonHzPerG;
    t.zeta = t.dzeta * b_gauss;
    const double kappa = c.electron_g_factor * kBohrMagnetonHzPerG + (c.nuclear_moment / kI) * kNuclearMagnetonHzPerG;
    t.dx = kappa / t.dw;
    t.x = t.dx * b_gauss;
    return t;
}

void check_field(FieldPoint b) {
    if (!(b.gauss >= 0.0))
        throw std::invalid_argument("magnetic field must be >= 0 gauss");
}

}  // namespace

void check_state(const HyperfineState& s) {
    if ((s.f != 3 && s.f != 4) || std::abs(s.m) > s.f)
        throw std::invalid_argument("invalid hyperfine state (F=" + std::to_string(s.f) +
                                    ", M=" + std::to_string(s.m) + ")");
}

const std::array<HyperfineState, 16>& all_states() {
    static const std::array<HyperfineState, 16> states = [] {
        std::array<HyperfineState, 16> a{};
        int i = 0;
        for (int m = -4; m <= 4; ++m)
            a[i++] = {4, m};
        for (int m = -3; m <= 3; ++m)
            a[i++] = {3, m};
        return a;
    }();
    return states;
}

int state_index(const HyperfineState& s) {
    check_state(s);
    return s.f == 4 ? s.m + 4 : 9 + s.m + 3;
}

double state_energy(const HyperfineState& s, FieldPoint b, const AtomicConstants& c) {
    check_state(s);
    check_field(b);
    const BrTerms t = br_terms(b.gauss, c);
    if (s.f == 4 && std::abs(s.m) == 4) {
        const double sign = s.m > 0 ? 1.0 : -1.0;
        return t.a * kI / 2.0 +
               sign * (c.electron_g_factor * kBohrMagnetonHzPerG * b.gauss / 2.0 + t.zeta * kI);
    }
    const double root = std::sqrt(1.0 + s.m * t.x / 2.0 + t.x * t.x);
    const double branch = (s.f == 4 ? 1.0 : -1.0);
    return -t.a / 4.0 + t.zeta * s.m + branch * (t.dw / 2.0) * root;
}

double state_energy_derivative(const HyperfineState& s, FieldPoint b, const AtomicConstants& c) {
    check_state(s);
    check_field(b);
    const BrTerms t = br_terms(b.gauss, c);
    if (s.f == 4 && std::abs(s.m) == 4) {
        const double sign = s.m > 0 ? 1.0 : -1.0;
        return sign * (c.electron_g_factor * kBohrMagnetonHzPerG / 2.0 + t.dzeta * kI);
    }
    const double root = std::sqrt(1.0 + s.m * t.x / 2.0 + t.x * t.x);
    const double branch = (s.f == 4 ? 1.0 : -1.0);
    return t.dzeta * s.m + branch * (t.dw / 2.0) * (s.m / 2.0 + 2.0 * t.x) * t.dx / (2.0 * root);
}

double transition_frequency(const HyperfineState& s1, const HyperfineState& s2, FieldPoint b,
                            const AtomicConstants& c) {
    if (s1 == s2)
        throw std::invalid_argument("transition_frequency: states must differ");
    return std::abs(state_energy(s1, b, c) - state_energy(s2, b, c));
}

double transition_frequency_derivative(const HyperfineState& s1, const HyperfineState& s2,
                                       FieldPoint b, const AtomicConstants& c) {
    if (s1 == s2)
        throw std::invalid_argument("transition_frequency_derivative: states must differ");
    const double e1 = state_energy(s1, b, c);
    const double e2 = state_energy(s2, b, c);
    const double d = state_energy_derivative(s1, b, c) - state_energy_derivative(s2, b, c);
    return e1 >= e2 ? d : -d;
}

double transition_frequency_curvature(const HyperfineState& s1, const HyperfineState& s2,
                                      FieldPoint b, const AtomicConstants& c, double step_gauss) {
    const double dp = transition_frequency_derivative(s1, s2, {b.gauss + step_gauss}, c);
    const double dm = transition_frequency_derivative(s1, s2, {b.gauss - step_gauss}, c);
    return (dp - dm) / (2.0 * step_gauss);
}

FieldPoint field_independent_point(const HyperfineState& s1, const HyperfineState& s2,
                                   const AtomicConstants& c, SearchInterval interval) {
    double lo = interval.lo_gauss;
    double hi = interval.hi_gauss;
    if (!(lo >= 0.0) || !(hi > lo))
        throw std::invalid_argument("field_independent_point: bad search interval");
    auto deriv = [&](double b) { return transition_frequency_derivative(s1, s2, {b}, c); };
    double flo = deriv(lo);
    double fhi = deriv(hi);
    if (flo == 0.0)
        return {lo};
    if (fhi == 0.0)
        return {hi};
    if (flo * fhi > 0.0)
        throw std::runtime_error("no clock point: df/dB does not change sign in interval");
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        const double fm = deriv(mid);
        if (fm == 0.0)
            return {mid};
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    // one Newton polish on the analytic derivative
    double b0 = 0.5 * (lo + hi);
    const double curv = transition_frequency_curvature(s1, s2, {b0}, c);
    if (curv != 0.0) {
        const double step = deriv(b0) / curv;
        if (std::abs(step) < (interval.hi_gauss - interval.lo_gauss))
            b0 -= step;
    }
    return {b0};
}

namespace {

// Clebsch-Gordan amplitudes for |F M> in the J=1/2 (x) I=7/2 product basis
// (Condon-Shortley). |F=4,M> = a|mJ=+1/2,mI=M-1/2> + b|mJ=-1/2,mI=M+1/2>,
// |F=3,M> = -b|+1/2,M-1/2> + a|-1/2,M+1/2>.
struct Coupled {
    double up = 0.0;    // amplitude of mJ = +1/2, mI = M - 1/2
    double down = 0.0;  // amplitude of mJ = -1/2, mI = M + 1/2
};

Coupled coupled_amplitudes(const HyperfineState& s) {
    const double a = std::sqrt((kI + 0.5 + s.m) / (2.0 * kI + 1.0));
    const double b = std::sqrt((kI + 0.5 - s.m) / (2.0 * kI + 1.0));
    Coupled out;
    if (s.f == 4) {
        if (s.m - 0.5 >= -kI - 0.25)
            out.up = a;
        if (s.m + 0.5 <= kI + 0.25)
            out.down = b;
    } else {
        out.up = -b;
        out.down = a;
    }
    return out;
}

// <s2| J_q |s1> with spherical components J_{+1} = -J_+/sqrt(2), J_0 = J_z,
// J_{-1} = J_-/sqrt(2); nonzero only when M2 - M1 = q.
double j_component_element(const HyperfineState& s2, const HyperfineState& s1, int q) {
    if (s2.m - s1.m != q)
        return 0.0;
    const Coupled c1 = coupled_amplitudes(s1);
    const Coupled c2 = coupled_amplitudes(s2);
    if (q == 0) {
        // same mI pairs: (+1/2, M-1/2) and (-1/2, M+1/2)
        return 0.5 * c2.up * c1.up - 0.5 * c2.down * c1.down;
    }
    if (q == 1) {
        // J_+ raises mJ at fixed mI: |-1/2, mI=M1+1/2> -> |+1/2, mI=M1+1/2>
        // target state s2 has M2 = M1+1, so its "up" slot has mI = M2-1/2 = M1+1/2
        return -(1.0 / std::sqrt(2.0)) * c2.up * c1.down;
    }
    // q == -1: J_- lowers mJ: |+1/2, mI=M1-1/2> -> |-1/2, mI=M1-1/2>
    return (1.0 / std::sqrt(2.0)) * c2.down * c1.up;
}

// level ordering used to assign the polarization label q = M_upper - M_lower
bool is_upper(const HyperfineState& a, const HyperfineState& b) {
    if (a.f != b.f)
        return a.f == 3;  // F=3 above F=4 (A < 0)
    if (a.f == 4)
        return a.m > b.m;  // energy rises with M within F=4
    return a.m < b.m;      // and falls with M within F=3
}

double qubit_reference_element() {
    static const double ref = std::abs(j_component_element(qubit_up(), qubit_down(), 1));
    return ref;
}

}  // namespace

double coupling_strength(const HyperfineState& s1, const HyperfineState& s2,
                         const Polarization& pol) {
    check_state(s1);
    check_state(s2);
    if (s1 == s2 || std::abs(s1.m - s2.m) > 1)
        return 0.0;
    const HyperfineState& up = is_upper(s1, s2) ? s1 : s2;
    const HyperfineState& lo = is_upper(s1, s2) ? s2 : s1;
    const int q = up.m - lo.m;
    const double weight = q == -1 ? pol.sigma_minus : (q == 0 ? pol.pi : pol.sigma_plus);
    return weight * j_component_element(up, lo, q) / qubit_reference_element();
}

double ac_zeeman_shift(const HyperfineState& s_down, const HyperfineState& s_up,
                       const DriveSpec& drive, FieldPoint b, const AtomicConstants& c) {
    check_state(s_down);
    check_state(s_up);
    if (drive.pol.sigma_plus == 0.0)
        throw std::invalid_argument("ac_zeeman_shift: sigma+ weight must be nonzero (qubit drive)");
    const double f_drive = transition_frequency(s_down, s_up, b, c);
    const double omega_d = hz_to_rad(f_drive);
    const double scale = drive.qubit_rabi_rad / drive.pol.sigma_plus;

    double shift_rad = 0.0;  // accumulates d(omega_up) - d(omega_down)
    for (const HyperfineState& k : {s_down, s_up}) {
        const double sign_k = (k == s_up) ? 1.0 : -1.0;
        for (const HyperfineState& s : all_states()) {
            if (s == k || (s == s_down && k == s_up) || (s == s_up && k == s_down))
                continue;
            if (std::abs(s.m - k.m) > 1)
                continue;
            const double coupling = coupling_strength(k, s, drive.pol);
            if (coupling == 0.0)
                continue;
            const double omega = scale * std::abs(coupling);
            const double omega_t = hz_to_rad(transition_frequency(k, s, b, c));
            const double delta = omega_d - omega_t;
            if (std::abs(omega / delta) > 0.1)
                throw std::domain_error(
                    "ac_zeeman_shift: spectator transition too close to resonance for "
                    "second-order perturbation theory");
            // second-order shift of the pair's lower level, both rotating terms
            const double lower_shift =
                (omega * omega / 4.0) * (1.0 / delta - 1.0 / (omega_d + omega_t));
            const double level_shift = is_upper(k, s) ? -lower_shift : lower_shift;
            shift_rad += sign_k * level_shift;
        }
    }
    return rad_to_hz(shift_rad);
}

}  // namespace ionsim
