#include "ionsim/pulse.hpp"

#include "ionsim/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace ionsim {

void check_pulse(const PulseSpec& p) {
    if (!(p.duration_s > 0.0))
        throw std::invalid_argument("pulse duration must be > 0");
    if (p.rabi_rad < 0.0)
        throw std::invalid_argument("rabi frequency must be >= 0");
    if (p.kind == PulseKind::delay && p.rabi_rad != 0.0)
        throw std::invalid_argument("delay implies rabi = 0");
}

Mat2 two_level_propagator(const PulseSpec& p) {
    check_pulse(p);
    const double om = p.kind == PulseKind::delay ? 0.0 : p.rabi_rad;
    const double dz = hz_to_rad(p.detuning_hz);
    const double oeff = std::hypot(om, dz);
    const double theta = oeff * p.duration_s;
    const double ch = std::cos(theta / 2.0);
    const double sh = std::sin(theta / 2.0);
    double nx = 0.0, ny = 0.0, nz = 0.0;
    if (oeff > 0.0) {
        nx = om * std::cos(p.phase_rad) / oeff;
        ny = om * std::sin(p.phase_rad) / oeff;
        nz = dz / oeff;
    }
    const std::complex<double> i(0.0, 1.0);
    Mat2 u;
    u(0, 0) = ch - i * sh * nz;
    u(0, 1) = -i * sh * (nx - i * ny);
    u(1, 0) = -i * sh * (nx + i * ny);
    u(1, 1) = ch + i * sh * nz;
    return u;
}

AxisAngle rotation_axis_angle(const Mat2& u) {
    // remove global phase: write U = e^{i alpha} (cos(t/2) I - i sin(t/2) n.sigma)
    std::complex<double> det = u.determinant();
    const std::complex<double> phase = std::sqrt(det);
    Mat2 su = u / phase;
    double c = 0.5 * std::real(su(0, 0) + su(1, 1));
    c = std::clamp(c, -1.0, 1.0);
    Eigen::Vector3d n;
    n.x() = -std::imag(su(1, 0) + su(0, 1)) / 2.0;
    n.y() = std::real(su(1, 0) - su(0, 1)) / 2.0;
    n.z() = -std::imag(su(0, 0) - su(1, 1)) / 2.0;
    const double s = n.norm();
    double angle = 2.0 * std::atan2(s, c);
    if (s > 1e-14) {
        n /= s;
    } else {
        n = Eigen::Vector3d::UnitZ();
        angle = c > 0 ? 0.0 : kTwoPi;
    }
    // canonical form: angle in [0, 2 pi), axis flipped so first nonzero
    // component is positive when the angle is pi (sign degenerate)
    if (angle >= kTwoPi)
        angle -= kTwoPi;
    return {n, angle};
}

}  // namespace ionsim
