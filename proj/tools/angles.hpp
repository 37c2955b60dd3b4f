#pragma once

#include <string_view>

namespace qpulse::cli {

/// Angle from a command-line token: plain radians ("1.57"), pi expressions
/// ("pi", "pi/2", "3pi/4", "-2pi", "0.5pi"), or degrees with a "deg" suffix
/// ("90deg", "-45.5deg"). Throws std::invalid_argument on anything else.
double parse_angle(std::string_view token);

}  // namespace qpulse::cli
