#include "angles.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

#include "qpulse/qubit.hpp"

namespace qpulse::cli {

namespace {

[[noreturn]] void bad(std::string_view token) {
  throw std::invalid_argument("cannot parse angle '" + std::string(token) +
                              "' (expected radians, 'Npi/M', or 'Ndeg')");
}

/// Parses a plain decimal; returns false if sv is empty or malformed.
bool parse_number(std::string_view sv, double& out) {
  if (sv.empty()) return false;
  const char* first = sv.data();
  const char* last = sv.data() + sv.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

double parse_angle(std::string_view token) {
  std::string_view sv = token;
  if (sv.empty()) bad(token);

  double sign = 1.0;
  if (sv.front() == '+' || sv.front() == '-') {
    if (sv.front() == '-') sign = -1.0;
    sv.remove_prefix(1);
    if (sv.empty()) bad(token);
  }

  if (sv.size() >= 3 && sv.substr(sv.size() - 3) == "deg") {
    double degrees = 0.0;
    if (!parse_number(sv.substr(0, sv.size() - 3), degrees)) bad(token);
    return sign * deg_to_rad(degrees);
  }

  const auto pi_pos = sv.find("pi");
  if (pi_pos == std::string_view::npos) {
    double radians = 0.0;
    if (!parse_number(sv, radians)) bad(token);
    return sign * radians;
  }

  double coefficient = 1.0;
  if (pi_pos > 0 && !parse_number(sv.substr(0, pi_pos), coefficient)) bad(token);

  std::string_view rest = sv.substr(pi_pos + 2);
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/' ) bad(token);
    rest.remove_prefix(1);
    if (!parse_number(rest, divisor) || divisor == 0.0) bad(token);
  }
  return sign * coefficient * kPi / divisor;
}

}  // namespace qpulse::cli
