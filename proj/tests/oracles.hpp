#pragma once

// Independent oracles for the test suites. Nothing here touches the
// closed-form propagator under test: the integrator builds the Hamiltonian
// from scratch and steps the Schroedinger equation with classical RK4.

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include "qpulse/qubit.hpp"

namespace qpulse::test {

using Mat2 = std::array<std::array<Complex, 2>, 2>;

/// Generalized Rabi formula for a rectangular pulse of nominal area theta
/// applied to |0>, amplitude-scaled area error.
inline double rabi_p1_amplitude(double theta, double f, double g) {
  const double e = 1.0 + g;
  const double s2 = e * e + f * f;
  const double sn = std::sin(0.5 * theta * std::sqrt(s2));
  return (e * e / s2) * sn * sn;
}

/// Same for duration-scaled area error.
inline double rabi_p1_duration(double theta, double f, double g) {
  const double s2 = 1.0 + f * f;
  const double sn = std::sin(0.5 * theta * (1.0 + g) * std::sqrt(s2));
  return (1.0 / s2) * sn * sn;
}

/// The fringe formula: expected |1> population behind the analysis pulse.
inline double fringe_formula(double theta_m, double phi_m, double fringe_phase) {
  return 0.5 * (1.0 + std::sin(theta_m) * std::cos(phi_m - fringe_phase));
}

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

/// Brute-force propagator: RK4 time stepping of i dU/dt = H U with
/// H = (delta/2) sz + (Omega/2)(sx cos Phi + sy sin Phi), fine substeps.
inline Mat2 rk4_propagator(const PulseSequence& seq, const ErrorParams& errors,
                           int substeps_per_radian = 2000) {
  const Complex i1{0.0, 1.0};
  Mat2 u{{{Complex{1.0, 0.0}, Complex{0.0, 0.0}},
          {Complex{0.0, 0.0}, Complex{1.0, 0.0}}}};
  const double amp_scale =
      errors.g_mode == GMode::AmplitudeScale ? 1.0 + errors.g : 1.0;
  const double dur_scale =
      errors.g_mode == GMode::DurationScale ? 1.0 + errors.g : 1.0;
  const double delta = errors.f * seq.rabi_nominal;
  for (const PulseStep& s : seq.steps) {
    const double omega = s.amplitude * amp_scale * seq.rabi_nominal;
    const double t_end = s.duration * dur_scale;
    if (t_end == 0.0) continue;
    const Complex off = 0.5 * omega * Complex{std::cos(s.phase), -std::sin(s.phase)};
    const Mat2 h{{{Complex{0.5 * delta, 0.0}, off},
                  {std::conj(off), Complex{-0.5 * delta, 0.0}}}};
    const double rate = std::hypot(omega, delta);
    const int n = std::max(200, static_cast<int>(rate * t_end * substeps_per_radian) + 1);
    const double dt = t_end / n;
    const auto deriv = [&](const Mat2& x) {
      Mat2 d = mat_mul(h, x);
      for (auto& row : d)
        for (auto& v : row) v *= -i1;
      return d;
    };
    for (int k = 0; k < n; ++k) {
      const Mat2 k1 = deriv(u);
      Mat2 tmp = u;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) tmp[r][c] = u[r][c] + 0.5 * dt * k1[r][c];
      const Mat2 k2 = deriv(tmp);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) tmp[r][c] = u[r][c] + 0.5 * dt * k2[r][c];
      const Mat2 k3 = deriv(tmp);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) tmp[r][c] = u[r][c] + dt * k3[r][c];
      const Mat2 k4 = deriv(tmp);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          u[r][c] += dt / 6.0 * (k1[r][c] + 2.0 * k2[r][c] + 2.0 * k3[r][c] + k4[r][c]);
    }
  }
  return u;
}

/// |<1|U|0>|^2 for the brute-force propagator.
inline double rk4_p1_from0(const PulseSequence& seq, const ErrorParams& errors) {
  const Mat2 u = rk4_propagator(seq, errors);
  return std::norm(u[1][0]);
}

}  // namespace qpulse::test
