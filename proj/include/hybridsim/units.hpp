#pragma once

#include <numbers>

namespace hybridsim {

template <typename Real>
inline constexpr Real two_pi = Real(2) * std::numbers::pi_v<Real>;

// Electron gyromagnetic ratio, ordinary frequency per tesla.
inline constexpr double kGyromagneticHzPerTesla = 28.0e9;

// Reduced Planck constant, J*s. Converts natural-unit power (rad^2/s^2) to watts.
inline constexpr double kHbar = 1.054571817e-34;

template <typename Real>
constexpr Real hz_to_angular(Real hz) { return two_pi<Real> * hz; }

template <typename Real>
constexpr Real angular_to_hz(Real omega) { return omega / two_pi<Real>; }

template <typename Real>
constexpr Real natural_power_to_watts(Real power) { return Real(kHbar) * power; }

} // namespace hybridsim
