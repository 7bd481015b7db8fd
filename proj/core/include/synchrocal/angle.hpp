#pragma once

#include <cmath>
#include <numbers>

namespace synchrocal {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * (std::numbers::pi / 180.0); }
constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / std::numbers::pi); }

/// Wraps an angle in degrees into (-180, 180].
inline double wrap_degrees(double deg) noexcept
{
    double r = std::fmod(deg, 360.0);
    if (r <= -180.0)
        r += 360.0;
    else if (r > 180.0)
        r -= 360.0;
    return r;
}

} // namespace synchrocal
