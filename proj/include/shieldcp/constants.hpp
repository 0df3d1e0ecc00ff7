#pragma once

#include <numbers>

namespace shieldcp::constants {

// CODATA 2018, SI units.
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double mu0 = 1.25663706212e-6;        // N/A^2
inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double newton_G = 6.67430e-11;        // m^3 kg^-1 s^-2

inline constexpr double pi = std::numbers::pi;

}  // namespace shieldcp::constants
