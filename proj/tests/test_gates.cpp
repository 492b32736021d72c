#include "ionsim/gates.hpp"

#include "ionsim/benchmark.hpp"
#include "ionsim/constants.hpp"

#include "doctest.h"

#include <cmath>

using namespace ionsim;

namespace {

Mat2 z_rotation(double angle) {
    Mat2 u = Mat2::Zero();
    const std::complex<double> i(0.0, 1.0);
    u(0, 0) = std::exp(-i * angle / 2.0);
    u(1, 1) = std::exp(i * angle / 2.0);
    return u;
}

// error-free physical product of the compiled slot grid (unit Rabi, pi/2 slots)
Mat2 ideal_slot_product(const CompiledSequence& c) {
    Mat2 u = Mat2::Identity();
    for (const auto& slot : c.slots) {
        if (slot.is_drive)
            u = two_level_propagator(PulseSpec::drive_pulse(1.0, 0.0, slot.phase_rad, kPi / 2.0)) * u;
    }
    return u;
}

}  // namespace

TEST_CASE("seeded generation is deterministic and validates input") {
    CHECK_THROWS_AS(generate_sequence(0, 1), std::invalid_argument);
    const GateSequence a = generate_sequence(50, 12345);
    const GateSequence b = generate_sequence(50, 12345);
    REQUIRE(a.gates.size() == 50);
    CHECK(a.expect_up == b.expect_up);
    CHECK(a.terminal_phases == b.terminal_phases);
    for (std::size_t i = 0; i < a.gates.size(); ++i) {
        CHECK(a.gates[i].pauli == b.gates[i].pauli);
        CHECK(a.gates[i].clifford == b.gates[i].clifford);
    }
    CHECK(a.seed == 12345);
}

TEST_CASE("gate draws are uniform within 4 sigma") {
    const std::size_t n = 100000;
    const GateSequence seq = generate_sequence(n, 987);
    std::array<std::size_t, kNumPauli> pauli_counts{};
    std::array<std::size_t, kNumClifford> clifford_counts{};
    for (const auto& g : seq.gates) {
        ++pauli_counts[static_cast<int>(g.pauli)];
        ++clifford_counts[static_cast<int>(g.clifford)];
    }
    const double np = n / 8.0;
    const double sp = std::sqrt(n * (1.0 / 8.0) * (7.0 / 8.0));
    for (auto c : pauli_counts)
        CHECK(std::abs(static_cast<double>(c) - np) < 4.0 * sp);
    const double nc = n / 4.0;
    const double sc = std::sqrt(n * (1.0 / 4.0) * (3.0 / 4.0));
    for (auto c : clifford_counts)
        CHECK(std::abs(static_cast<double>(c) - nc) < 4.0 * sc);
}

TEST_CASE("every generated sequence reproduces its expected outcome ideally") {
    const PulseTimings t;
    const ErrorModel ideal;  // zero error
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        const GateSequence seq = generate_sequence(1 + seed % 50, seed * 77 + 5);
        const double fail = simulate_sequence(compile_sequence(seq), t, ideal);
        CHECK(fail < 1e-12);
    }
}

TEST_CASE("compiled pulse product equals the direct gate-matrix product") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        const GateSequence seq = generate_sequence(100, 1000 + seed);
        const CompiledSequence c = compile_sequence(seq);
        const Mat2 physical = ideal_slot_product(c);
        const Mat2 net = z_rotation(c.final_frame_rad) * physical;
        CHECK(equal_up_to_phase(net, ideal_sequence_unitary(seq), 1e-8));
    }
}

TEST_CASE("frame equivalence: deferred z rotations match explicit z propagators") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        const GateSequence seq = generate_sequence(60, 4000 + seed);
        const CompiledSequence c = compile_sequence(seq);
        const Vec2 from_frame =
            z_rotation(c.final_frame_rad) * ideal_slot_product(c) * ket_up();
        const Vec2 from_explicit = ideal_sequence_unitary(seq) * ket_up();
        const double overlap = std::abs(from_frame.dot(from_explicit));
        CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("pulse grid structure") {
    // a z Pauli followed by a +x Clifford: two delay slots, then the Clifford
    // pulse with its phase advanced by the frame rotation
    GateSequence seq;
    seq.gates.push_back({PauliGate::plus_z, CliffordGate::plus_x});
    {
        const CompiledSequence c = compile_sequence(seq);
        REQUIRE(c.slots.size() == 3);
        CHECK(!c.slots[0].is_drive);
        CHECK(!c.slots[1].is_drive);
        CHECK(c.slots[2].is_drive);
        CHECK(c.slots[2].phase_rad == doctest::Approx(kPi).epsilon(1e-12));
        CHECK(c.final_frame_rad == doctest::Approx(kPi).epsilon(1e-12));
    }

    // non-identity, non-z gates compile to 3 drive pulses per gate
    const PulseTimings t;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        GateSequence s2 = generate_sequence(40, 7000 + seed);
        bool all_physical = true;
        for (const auto& g : s2.gates)
            if (g.pauli == PauliGate::plus_i || g.pauli == PauliGate::minus_i ||
                g.pauli == PauliGate::plus_z || g.pauli == PauliGate::minus_z)
                all_physical = false;
        const auto pulses = compile_to_pulses(s2, t);
        std::size_t drives = 0, delays = 0;
        for (const auto& p : pulses)
            (p.kind == PulseKind::drive ? drives : delays) += 1;
        if (all_physical)
            CHECK(drives == 3 * s2.gates.size() + s2.terminal_phases.size());
        // dead-time gaps sit between consecutive slots
        const std::size_t slots = compile_sequence(s2).slots.size();
        CHECK(pulses.size() == 2 * slots - 1);
        CHECK(s2.terminal_phases.size() <= 2);
    }
}

TEST_CASE("terminal rotation reaches both targets with minimal pulses") {
    std::size_t zero_pulse_cases = 0, one_pulse_cases = 0, two_pulse_cases = 0;
    for (uint64_t seed = 0; seed < 300; ++seed) {
        const GateSequence seq = generate_sequence(10, 9000 + seed);
        switch (seq.terminal_phases.size()) {
            case 0: ++zero_pulse_cases; break;
            case 1: ++one_pulse_cases; break;
            case 2: ++two_pulse_cases; break;
            default: FAIL("terminal chain longer than two pulses");
        }
    }
    CHECK(zero_pulse_cases > 0);
    CHECK(one_pulse_cases > 0);
    CHECK(two_pulse_cases > 0);
}
