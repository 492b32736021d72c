#include "ionsim/gates.hpp"

#include "ionsim/constants.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace ionsim {

namespace {

// Bloch vectors with integer components track the ideal Clifford orbit
// exactly. Components are <sigma_x,y,z> in the (down, up) basis, so |down>
// sits at +z and |up> at -z; U = exp(-i theta n.sigma/2) rotates them
// right-handed about n.
struct IVec {
    int x = 0, y = 0, z = 0;
    friend bool operator==(const IVec&, const IVec&) = default;
};

IVec bloch_up() { return {0, 0, -1}; }
IVec bloch_pole(bool up) { return {0, 0, up ? -1 : 1}; }

// equatorial axes indexed by quarter turns: 0:+x 1:+y 2:-x 3:-y
IVec axis_of_quarter(int q) {
    switch (((q % 4) + 4) % 4) {
        case 0: return {1, 0, 0};
        case 1: return {0, 1, 0};
        case 2: return {-1, 0, 0};
        default: return {0, -1, 0};
    }
}

IVec cross(const IVec& a, const IVec& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

int dot(const IVec& a, const IVec& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

IVec rotate90(const IVec& axis, const IVec& v) {
    // right-handed quarter turn about a unit axis: v' = a (a.v) + a x v
    const int d = dot(axis, v);
    const IVec c = cross(axis, v);
    return {axis.x * d + c.x, axis.y * d + c.y, axis.z * d + c.z};
}

IVec rotate180(const IVec& axis, const IVec& v) {
    const int d = dot(axis, v);
    return {2 * axis.x * d - v.x, 2 * axis.y * d - v.y, 2 * axis.z * d - v.z};
}

int pauli_quarter(PauliGate g) {
    switch (g) {
        case PauliGate::plus_x: return 0;
        case PauliGate::plus_y: return 1;
        case PauliGate::minus_x: return 2;
        case PauliGate::minus_y: return 3;
        default: return -1;
    }
}

int clifford_quarter(CliffordGate g) {
    switch (g) {
        case CliffordGate::plus_x: return 0;
        case CliffordGate::plus_y: return 1;
        case CliffordGate::minus_x: return 2;
        default: return 3;
    }
}

bool is_z(PauliGate g) { return g == PauliGate::plus_z || g == PauliGate::minus_z; }
bool is_identity(PauliGate g) { return g == PauliGate::plus_i || g == PauliGate::minus_i; }

// ideal state after the gate list, starting from |up>
IVec track_state(const std::vector<ComputationalGate>& gates) {
    IVec v = bloch_up();
    for (const auto& g : gates) {
        if (is_z(g.pauli)) {
            v = rotate180({0, 0, 1}, v);
        } else if (!is_identity(g.pauli)) {
            v = rotate180(axis_of_quarter(pauli_quarter(g.pauli)), v);
        }
        v = rotate90(axis_of_quarter(clifford_quarter(g.clifford)), v);
    }
    return v;
}

// minimal pi/2-pulse chain (0, 1 or 2 pulses about +/-x,+/-y) mapping v to the
// target pole; fixed enumeration order keeps compilation deterministic
std::vector<int> terminal_quarters(const IVec& v, bool target_up) {
    const IVec target = bloch_pole(target_up);
    if (v == target)
        return {};
    for (int q = 0; q < 4; ++q) {
        if (rotate90(axis_of_quarter(q), v) == target)
            return {q};
    }
    for (int q1 = 0; q1 < 4; ++q1) {
        IVec mid = rotate90(axis_of_quarter(q1), v);
        for (int q2 = 0; q2 < 4; ++q2) {
            if (rotate90(axis_of_quarter(q2), mid) == target)
                return {q1, q2};
        }
    }
    throw std::logic_error("terminal rotation search failed");
}

Mat2 equatorial_rotation(double phase_rad, double angle_rad) {
    PulseSpec p = PulseSpec::drive_pulse(1.0, 0.0, phase_rad, angle_rad);
    return two_level_propagator(p);
}

Mat2 z_rotation(double angle_rad) {
    // exp(-i angle sigma_z / 2) in the (down, up) basis
    const std::complex<double> i(0.0, 1.0);
    Mat2 u = Mat2::Zero();
    u(0, 0) = std::exp(-i * angle_rad / 2.0);
    u(1, 1) = std::exp(i * angle_rad / 2.0);
    return u;
}

}  // namespace

GateSequence generate_sequence(std::size_t length, uint64_t seed) {
    if (length < 1)
        throw std::invalid_argument("generate_sequence: length must be >= 1");
    Rng rng(seed);
    GateSequence seq;
    seq.seed = seed;
    seq.gates.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        ComputationalGate g;
        g.pauli = static_cast<PauliGate>(rng.below(kNumPauli));
        g.clifford = static_cast<CliffordGate>(rng.below(kNumClifford));
        seq.gates.push_back(g);
    }
    seq.expect_up = rng.below(2) == 1;
    const IVec v = track_state(seq.gates);
    for (int q : terminal_quarters(v, seq.expect_up))
        seq.terminal_phases.push_back(q * kPi / 2.0);
    return seq;
}

CompiledSequence compile_sequence(const GateSequence& seq) {
    CompiledSequence out;
    out.expect_up = seq.expect_up;
    out.n_gates = seq.gates.size();
    out.seed = seq.seed;
    out.slots.reserve(3 * seq.gates.size() + seq.terminal_phases.size());
    int frame_quarters = 0;  // logical frame, quarter turns of phase
    auto push_drive = [&](int quarters) {
        CompiledSlot s;
        s.is_drive = true;
        s.phase_rad = (((quarters + frame_quarters) % 4 + 4) % 4) * kPi / 2.0;
        out.slots.push_back(s);
    };
    for (const auto& g : seq.gates) {
        if (is_identity(g.pauli) || is_z(g.pauli)) {
            out.slots.push_back({});
            out.slots.push_back({});
            if (is_z(g.pauli))
                frame_quarters += (g.pauli == PauliGate::plus_z) ? 2 : -2;
        } else {
            const int q = pauli_quarter(g.pauli);
            push_drive(q);
            push_drive(q);
        }
        push_drive(clifford_quarter(g.clifford));
    }
    for (double phase : seq.terminal_phases)
        push_drive(static_cast<int>(std::lround(phase / (kPi / 2.0))));
    out.final_frame_rad = frame_quarters * kPi / 2.0;
    return out;
}

std::vector<PulseSpec> compile_to_pulses(const GateSequence& seq, const PulseTimings& t) {
    const CompiledSequence c = compile_sequence(seq);
    std::vector<PulseSpec> out;
    out.reserve(2 * c.slots.size());
    bool first = true;
    for (const CompiledSlot& s : c.slots) {
        if (!first)
            out.push_back(PulseSpec::delay(0.0, t.dead_time_s));
        first = false;
        if (s.is_drive)
            out.push_back(PulseSpec::drive_pulse(t.nominal_rabi_rad(), 0.0, s.phase_rad, t.pi2_time_s));
        else
            out.push_back(PulseSpec::delay(0.0, t.pi2_time_s));
    }
    return out;
}

Mat2 ideal_pauli_unitary(PauliGate g) {
    if (is_identity(g))
        return Mat2::Identity();
    if (is_z(g))
        return z_rotation(g == PauliGate::plus_z ? kPi : -kPi);
    return equatorial_rotation(pauli_quarter(g) * kPi / 2.0, kPi);
}

Mat2 ideal_clifford_unitary(CliffordGate g) {
    return equatorial_rotation(clifford_quarter(g) * kPi / 2.0, kPi / 2.0);
}

Mat2 ideal_sequence_unitary(const GateSequence& seq) {
    Mat2 u = Mat2::Identity();
    for (const auto& g : seq.gates)
        u = ideal_clifford_unitary(g.clifford) * ideal_pauli_unitary(g.pauli) * u;
    for (double phase : seq.terminal_phases)
        u = equatorial_rotation(phase, kPi / 2.0) * u;
    return u;
}

}  // namespace ionsim
