#pragma once

#include <numbers>

namespace ionsim {

// CODATA 2018
inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kBohrMagnetonJT = 9.2740100783e-24;
inline constexpr double kProtonElectronMassRatio = 1836.15267343;

// magnetic moments in frequency units per gauss (1 T = 1e4 G)
inline constexpr double kBohrMagnetonHzPerG = kBohrMagnetonJT / kPlanckJs * 1e-4;
inline constexpr double kNuclearMagnetonHzPerG = kBohrMagnetonHzPerG / kProtonElectronMassRatio;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPi = std::numbers::pi;

inline constexpr double hz_to_rad(double f_hz) { return kTwoPi * f_hz; }
inline constexpr double rad_to_hz(double w_rad) { return w_rad / kTwoPi; }

}  // namespace ionsim
