#pragma once

#include "ionsim/pulse.hpp"
#include "ionsim/rng.hpp"

#include <cstdint>
#include <vector>

namespace ionsim {

// Pauli gates are pi rotations (or identity), Clifford gates pi/2 rotations.
enum class PauliGate : uint8_t {
    plus_x, plus_y, plus_z, minus_x, minus_y, minus_z, plus_i, minus_i
};
enum class CliffordGate : uint8_t { plus_x, plus_y, minus_x, minus_y };

inline constexpr int kNumPauli = 8;
inline constexpr int kNumClifford = 4;

// One computational gate: a Pauli followed by a Clifford.
struct ComputationalGate {
    PauliGate pauli;
    CliffordGate clifford;
};

struct GateSequence {
    std::vector<ComputationalGate> gates;
    // logical phases (rad) of the terminal pi/2 pulses, before frame rotation
    std::vector<double> terminal_phases;
    bool expect_up = false;  // expected measurement outcome
    uint64_t seed = 0;       // stream seed that generated the sequence
};

// Draws each Pauli uniformly from 8 options and each Clifford from 4, picks
// the target basis state with equal probability, and derives the minimal
// terminal rotation (0, 1 or 2 pi/2 pulses) mapping the ideal final state to
// it. Deterministic for a given seed.
GateSequence generate_sequence(std::size_t length, uint64_t seed);

// Physical slot grid: every computational gate occupies three pi/2-length
// slots (two for the Pauli, one for the Clifford). Identity and z Paulis fill
// their slots with delays; z Paulis additionally rotate the logical frame of
// all subsequent pulses.
struct CompiledSlot {
    bool is_drive = false;
    double phase_rad = 0.0;  // physical phase (frame applied), drives only
};

struct CompiledSequence {
    std::vector<CompiledSlot> slots;
    double final_frame_rad = 0.0;  // residual logical z rotation (before measurement)
    bool expect_up = false;
    std::size_t n_gates = 0;
    uint64_t seed = 0;
};

CompiledSequence compile_sequence(const GateSequence& seq);

struct PulseTimings {
    double pi2_time_s = 12.1e-6;
    double dead_time_s = 14e-6;
    double nominal_rabi_rad() const { return kPi_over_2() / pi2_time_s; }

  private:
    static constexpr double kPi_over_2() { return 1.5707963267948966; }
};

// Nominal physical pulse train: drive/delay slots with 14 us dead-time delays
// between consecutive slots. Drives carry the nominal pi/2 Rabi frequency and
// zero detuning; the error model adjusts them at simulation time.
std::vector<PulseSpec> compile_to_pulses(const GateSequence& seq, const PulseTimings& t);

// exact 2x2 unitaries for the ideal gate algebra
Mat2 ideal_pauli_unitary(PauliGate g);
Mat2 ideal_clifford_unitary(CliffordGate g);

// ideal net unitary of the whole sequence including terminal pulses
Mat2 ideal_sequence_unitary(const GateSequence& seq);

}  // namespace ionsim
