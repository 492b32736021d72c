#include "ionsim/manifold.hpp"

#include "ionsim/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace ionsim {

namespace {

constexpr std::complex<double> kImag(0.0, 1.0);

bool qubit_pair(const HyperfineState& a, const HyperfineState& b) {
    return (a == qubit_down() && b == qubit_up()) || (a == qubit_up() && b == qubit_down());
}

}  // namespace

Mat16 manifold_hamiltonian(const ManifoldDrive& d, FieldPoint b, const AtomicConstants& c) {
    if (d.pol.sigma_plus == 0.0)
        throw std::invalid_argument("manifold drive: sigma+ weight must be nonzero");
    Mat16 h = Mat16::Zero();
    const auto& states = all_states();
    for (int i = 0; i < 16; ++i) {
        const double e = state_energy(states[i], b, c);
        h(i, i) = hz_to_rad(e - (states[i].f == 3 ? d.frequency_hz : 0.0));
    }
    const double scale = d.qubit_rabi_rad / d.pol.sigma_plus;
    const std::complex<double> phase = std::exp(kImag * d.phase_rad);
    for (int lo = 0; lo < 16; ++lo) {
        for (int up = 0; up < 16; ++up) {
            if (states[lo].f != 4 || states[up].f != 3)
                continue;
            if (std::abs(states[up].m - states[lo].m) > 1)
                continue;
            if (d.filter == CouplingFilter::qubit_only && !qubit_pair(states[lo], states[up]))
                continue;
            const double coupling = coupling_strength(states[lo], states[up], d.pol);
            if (coupling == 0.0)
                continue;
            h(up, lo) += 0.5 * scale * std::abs(coupling) * phase;
            h(lo, up) += 0.5 * scale * std::abs(coupling) * std::conj(phase);
        }
    }
    return h;
}

ManifoldEngine::ManifoldEngine(const ManifoldDrive& d, FieldPoint b, const AtomicConstants& c) {
    ManifoldDrive base = d;
    base.phase_rad = 0.0;
    Mat16 h = manifold_hamiltonian(base, b, c);
    Eigen::SelfAdjointEigenSolver<Mat16> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("manifold eigendecomposition failed");
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();
    const auto& states = all_states();
    for (int i = 0; i < 16; ++i) {
        diag_(i) = hz_to_rad(state_energy(states[i], b, c) -
                             (states[i].f == 3 ? d.frequency_hz : 0.0));
        frame_n_(i) = states[i].f == 3 ? 1.0 : 0.0;
    }
    idx_down_ = state_index(qubit_down());
    idx_up_ = state_index(qubit_up());
}

Mat16 ManifoldEngine::pulse(double phase_rad, double duration_s) const {
    Vec16 ph;
    for (int i = 0; i < 16; ++i)
        ph(i) = std::exp(-kImag * evals_(i) * duration_s);
    Mat16 u0 = evecs_ * ph.asDiagonal() * evecs_.adjoint();
    if (phase_rad == 0.0)
        return u0;
    Vec16 dress;
    for (int i = 0; i < 16; ++i)
        dress(i) = std::exp(kImag * phase_rad * frame_n_(i));
    return dress.asDiagonal() * u0 * dress.conjugate().asDiagonal();
}

Mat16 ManifoldEngine::delay(double duration_s) const {
    Mat16 u = Mat16::Zero();
    for (int i = 0; i < 16; ++i)
        u(i, i) = std::exp(-kImag * diag_(i) * duration_s);
    return u;
}

Mat16 sixteen_level_propagator(const ManifoldDrive& d, double duration_s, FieldPoint b,
                               const AtomicConstants& c) {
    if (!(duration_s > 0.0))
        throw std::invalid_argument("sixteen_level_propagator: duration must be > 0");
    ManifoldEngine engine(d, b, c);
    return engine.pulse(d.phase_rad, duration_s);
}

Mat16 sixteen_level_propagator_stepped(const ManifoldDrive& d, double duration_s, FieldPoint b,
                                       const AtomicConstants& c, double step_s) {
    if (!(duration_s > 0.0))
        throw std::invalid_argument("sixteen_level_propagator_stepped: duration must be > 0");
    if (!(step_s > 0.0) || !std::isfinite(step_s))
        throw std::runtime_error("integration error: invalid step size");
    const double steps_d = std::ceil(duration_s / step_s);
    if (steps_d > 5e7)
        throw std::runtime_error("integration error: step count limit exceeded");
    const int n_steps = static_cast<int>(steps_d);
    const double dt = duration_s / n_steps;

    // bare interaction picture: diagonal energies removed, couplings rotate at
    // their detuning from the drive
    const auto& states = all_states();
    Eigen::Matrix<double, 16, 1> bare;
    for (int i = 0; i < 16; ++i)
        bare(i) = hz_to_rad(state_energy(states[i], b, c) -
                            (states[i].f == 3 ? d.frequency_hz : 0.0));
    ManifoldDrive base = d;
    base.phase_rad = 0.0;
    Mat16 h0 = manifold_hamiltonian(base, b, c);
    Mat16 coupling = h0;
    for (int i = 0; i < 16; ++i)
        coupling(i, i) = 0.0;
    const std::complex<double> phase = std::exp(kImag * d.phase_rad);

    Mat16 u = Mat16::Identity();
    for (int k = 0; k < n_steps; ++k) {
        const double tm = (k + 0.5) * dt;
        Mat16 h = Mat16::Zero();
        for (int r = 0; r < 16; ++r) {
            for (int col = 0; col < 16; ++col) {
                if (r == col || coupling(r, col) == std::complex<double>(0.0, 0.0))
                    continue;
                const std::complex<double> rot = std::exp(kImag * (bare(r) - bare(col)) * tm);
                const std::complex<double> ph = states[r].f == 3 ? phase : std::conj(phase);
                h(r, col) = coupling(r, col) * rot * ph;
            }
        }
        Eigen::SelfAdjointEigenSolver<Mat16> solver(h);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("integration error: eigendecomposition failed");
        Vec16 e;
        for (int i = 0; i < 16; ++i)
            e(i) = std::exp(-kImag * solver.eigenvalues()(i) * dt);
        u = solver.eigenvectors() * e.asDiagonal() * solver.eigenvectors().adjoint() * u;
    }
    // back to the static rotating frame
    Vec16 dframe;
    for (int i = 0; i < 16; ++i)
        dframe(i) = std::exp(-kImag * bare(i) * duration_s);
    return dframe.asDiagonal() * u;
}

}  // namespace ionsim
