#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ionsim {

// Ground-level hyperfine state of 43Ca+ (4S_1/2, I = 7/2): F in {3,4}, |M| <= F.
struct HyperfineState {
    int f = 4;
    int m = 0;

    friend bool operator==(const HyperfineState&, const HyperfineState&) = default;
};

// Validates quantum numbers; throws std::invalid_argument on a bad (F, M).
void check_state(const HyperfineState& s);

// All 16 states, fixed order: (4,-4)..(4,+4), (3,-3)..(3,+3).
const std::array<HyperfineState, 16>& all_states();
int state_index(const HyperfineState& s);

struct AtomicConstants {
    // zero-field hyperfine splitting |E(F=3) - E(F=4)| at B = 0, Hz.
    // In 43Ca+ the hyperfine constant A is negative, so F=3 lies above F=4.
    double zero_field_splitting_hz = 3225608286.4;
    // nuclear magnetic moment in units of the nuclear magneton
    double nuclear_moment = -1.31535;
    // Lande g-factor of the 4S_1/2 level (measured Ca+ value; override in config)
    double electron_g_factor = 2.00225664;

    static constexpr double nuclear_spin = 3.5;
};

struct FieldPoint {
    double gauss = 0.0;
};

// Breit-Rabi energy in frequency units (Hz). Stretched states (4, +/-4) use the
// exact linear branch. Throws on invalid state or B < 0.
double state_energy(const HyperfineState& s, FieldPoint b, const AtomicConstants& c);

// d(state_energy)/dB in Hz/G, from the analytic derivative of the Breit-Rabi
// expression.
double state_energy_derivative(const HyperfineState& s, FieldPoint b, const AtomicConstants& c);

// |E(s1) - E(s2)| in Hz. Throws if s1 == s2.
double transition_frequency(const HyperfineState& s1, const HyperfineState& s2, FieldPoint b,
                            const AtomicConstants& c);

// signed d(transition_frequency)/dB in Hz/G
double transition_frequency_derivative(const HyperfineState& s1, const HyperfineState& s2,
                                       FieldPoint b, const AtomicConstants& c);

// d^2 f/dB^2 in Hz/G^2 (central finite difference of the analytic derivative)
double transition_frequency_curvature(const HyperfineState& s1, const HyperfineState& s2,
                                      FieldPoint b, const AtomicConstants& c,
                                      double step_gauss = 1e-3);

struct SearchInterval {
    double lo_gauss = 100.0;
    double hi_gauss = 200.0;
};

// Field where df/dB = 0, located by bisection to 1e-4 G plus one Newton polish.
// Throws std::runtime_error("no clock point ...") when df/dB does not change
// sign on the interval.
FieldPoint field_independent_point(const HyperfineState& s1, const HyperfineState& s2,
                                   const AtomicConstants& c, SearchInterval interval);

// Relative amplitude weights of the microwave field's spherical components.
struct Polarization {
    double sigma_minus = 0.0;
    double pi = 0.0;
    double sigma_plus = 1.0;
};

// Magnetic-dipole matrix element between two states, expressed as a Rabi
// factor relative to the (4,0)<->(3,+1) sigma+ element and scaled by the
// polarization weight of the driving component. Zero for |dM| > 1 and for
// s1 == s2. The component label q = M_upper - M_lower follows the level
// ordering of 43Ca+ (F=3 above F=4; within F=4 energy rises with M, within
// F=3 it falls).
double coupling_strength(const HyperfineState& s1, const HyperfineState& s2,
                         const Polarization& pol);

struct DriveSpec {
    double qubit_rabi_rad = 0.0;  // Rabi frequency of the (4,0)<->(3,+1) sigma+ transition
    Polarization pol;
};

// Differential second-order (a.c. Zeeman) shift of the (4,0)<->(3,+1) qubit
// transition in Hz from off-resonant coupling of the drive to every spectator
// transition. Includes both rotating terms, so far-detuned same-F pairs are
// suppressed correctly. Throws std::domain_error when a spectator is too close
// to resonance for second-order perturbation theory (|Omega/Delta| > 0.1).
double ac_zeeman_shift(const HyperfineState& s_down, const HyperfineState& s_up,
                       const DriveSpec& drive, FieldPoint b, const AtomicConstants& c);

inline HyperfineState qubit_down() { return {4, 0}; }
inline HyperfineState qubit_up() { return {3, 1}; }
inline HyperfineState stretch_state() { return {4, 4}; }

}  // namespace ionsim
