#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace ionsim {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

enum class PulseKind { drive, delay };

// One rectangular segment: a constant-amplitude drive or a free-evolution
// delay. Frame convention: the qubit frame rotates at the drive frequency, so
// delays accumulate phase at the drive-qubit detuning.
struct PulseSpec {
    PulseKind kind = PulseKind::drive;
    double rabi_rad = 0.0;      // Omega, rad/s (0 for delay)
    double detuning_hz = 0.0;   // drive frequency minus transition frequency
    double phase_rad = 0.0;     // phi
    double duration_s = 0.0;    // t > 0

    static PulseSpec drive_pulse(double rabi_rad, double detuning_hz, double phase_rad,
                                 double duration_s) {
        return {PulseKind::drive, rabi_rad, detuning_hz, phase_rad, duration_s};
    }
    static PulseSpec delay(double detuning_hz, double duration_s) {
        return {PulseKind::delay, 0.0, detuning_hz, 0.0, duration_s};
    }
};

void check_pulse(const PulseSpec& p);  // throws on invalid spec

// Basis convention: index 0 = |down>, index 1 = |up>.
inline Vec2 ket_down() { return Vec2(1.0, 0.0); }
inline Vec2 ket_up() { return Vec2(0.0, 1.0); }

// Exact propagator of the rotating-frame Rabi Hamiltonian
//   H = (1/2) [Omega cos(phi) sx + Omega sin(phi) sy + 2 pi delta sz],
// a rotation by Omega_eff*t about the Bloch axis (Omega cos phi, Omega sin phi,
// 2 pi delta)/Omega_eff with Omega_eff = sqrt(Omega^2 + (2 pi delta)^2).
// A delay is the Omega = 0 case (pure z phase at the detuning).
Mat2 two_level_propagator(const PulseSpec& p);

// Bloch rotation axis (unit) and angle in [0, 2 pi) of a 2x2 unitary,
// discarding the global phase.
struct AxisAngle {
    Eigen::Vector3d axis;
    double angle;
};
AxisAngle rotation_axis_angle(const Mat2& u);

// max-norm of U^dag U - I
template <typename Mat>
double unitarity_defect(const Mat& u) {
    Mat d = u.adjoint() * u - Mat::Identity();
    return d.cwiseAbs().maxCoeff();
}

// nearest unitary (polar factor via SVD)
template <typename Mat>
Mat reunitarize(const Mat& u) {
    Eigen::JacobiSVD<Mat> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline constexpr int kReunitarizeEvery = 512;

// Right-to-left ordered product (segments[0] acts first); projects back to the
// unitary group every kReunitarizeEvery factors to bound floating-point drift.
// Empty input gives the identity. Throws on dimension mismatch for dynamic
// matrices.
template <typename Mat>
Mat compose(const std::vector<Mat>& segments) {
    Mat u = Mat::Identity(segments.empty() ? 2 : segments.front().rows(),
                          segments.empty() ? 2 : segments.front().cols());
    int count = 0;
    for (const Mat& s : segments) {
        u = s * u;
        if (++count % kReunitarizeEvery == 0)
            u = reunitarize(u);
    }
    return u;
}

// true iff a and b are equal up to a global phase, within tol (max-norm)
template <typename Mat>
bool equal_up_to_phase(const Mat& a, const Mat& b, double tol) {
    Eigen::Index r = 0, c = 0;
    b.cwiseAbs().maxCoeff(&r, &c);
    if (std::abs(b(r, c)) < 1e-15)
        return (a - b).cwiseAbs().maxCoeff() < tol;
    std::complex<double> phase = a(r, c) / b(r, c);
    const double mag = std::abs(phase);
    if (mag < 1e-15)
        return false;
    phase /= mag;
    return (a - phase * b).cwiseAbs().maxCoeff() < tol;
}

}  // namespace ionsim
