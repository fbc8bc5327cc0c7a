#pragma once

#include <numbers>

namespace spdc {

// speed of light in micrometers per picosecond
inline constexpr double c_um_per_ps = 299.792458;

inline constexpr double pi = std::numbers::pi;

inline constexpr double deg_to_rad(double d) { return d * pi / 180.0; }
inline constexpr double rad_to_deg(double r) { return r * 180.0 / pi; }

// angular frequency (rad/ps) of vacuum wavelength in micrometers
inline constexpr double omega_of_lambda(double lambda_um) {
    return 2.0 * pi * c_um_per_ps / lambda_um;
}

}  // namespace spdc
