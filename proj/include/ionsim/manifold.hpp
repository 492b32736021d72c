#pragma once

#include "ionsim/hyperfine.hpp"
#include "ionsim/pulse.hpp"

#include <Eigen/Dense>

#include <complex>

namespace ionsim {

using Mat16 = Eigen::Matrix<std::complex<double>, 16, 16>;
using Vec16 = Eigen::Matrix<std::complex<double>, 16, 1>;

enum class CouplingFilter {
    all,         // every dipole-allowed F=4 <-> F=3 pair
    qubit_only,  // spectator couplings zeroed (embedding checks)
};

// Microwave drive acting on the full ground manifold.
struct ManifoldDrive {
    double frequency_hz = 0.0;    // lab drive frequency, near the qubit transition
    double qubit_rabi_rad = 0.0;  // Rabi frequency of the (4,0)<->(3,+1) sigma+ transition
    Polarization pol;
    double phase_rad = 0.0;
    CouplingFilter filter = CouplingFilter::all;
};

// Rotating-frame Hamiltonian in rad/s: F=3 levels are shifted down by the
// drive frequency, which leaves every driven (dF = 1) coupling static after
// dropping its counter-rotating term. Same-F pairs have no slowly rotating
// term at this drive frequency and are dropped entirely.
Mat16 manifold_hamiltonian(const ManifoldDrive& d, FieldPoint b, const AtomicConstants& c);

// Propagator over one segment, computed by Hermitian eigendecomposition
// (exact for the constant rotating-frame Hamiltonian).
Mat16 sixteen_level_propagator(const ManifoldDrive& d, double duration_s, FieldPoint b,
                               const AtomicConstants& c);

// Validation route: the same physics integrated in the bare interaction
// picture, where each coupling carries its explicit detuning phase, using
// fixed-step midpoint-exponential (Magnus 2nd order) steps. Agrees with
// sixteen_level_propagator up to integrator error. Throws on a bad step size.
Mat16 sixteen_level_propagator_stepped(const ManifoldDrive& d, double duration_s, FieldPoint b,
                                       const AtomicConstants& c, double step_s = 1e-9);

// Reusable engine for pulse-train simulation: the eigendecomposition is done
// once, pulses at other phases are obtained by diagonal phase dressing
//   U(phi) = P(phi) U(0) P(phi)^dag,  P = exp(i phi N), N = 1 on F=3 levels.
class ManifoldEngine {
  public:
    ManifoldEngine(const ManifoldDrive& d, FieldPoint b, const AtomicConstants& c);

    Mat16 pulse(double phase_rad, double duration_s) const;
    Mat16 delay(double duration_s) const;

    int index_down() const { return idx_down_; }
    int index_up() const { return idx_up_; }

  private:
    Eigen::Matrix<double, 16, 1> evals_;       // rad/s
    Mat16 evecs_;
    Eigen::Matrix<double, 16, 1> diag_;        // bare rotating-frame energies, rad/s
    Eigen::Matrix<double, 16, 1> frame_n_;     // 1 for F=3 levels
    int idx_down_;
    int idx_up_;
};

}  // namespace ionsim
