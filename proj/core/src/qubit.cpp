#include "qpulse/qubit.hpp"

#include <cmath>
#include <stdexcept>

#include "qpulse/errors.hpp"

namespace qpulse {

namespace {

bool finite(double x) { return std::isfinite(x); }

/// sin(a/2)/a, stable at a -> 0.
double half_sinc(double a) {
  if (a < 1e-4) {
    const double a2 = a * a;
    return 0.5 - a2 / 48.0 + a2 * a2 / 3840.0;
  }
  return std::sin(0.5 * a) / a;
}

/// ((a/2) cos(a/2) - sin(a/2)) / a^3, stable at a -> 0.
/// This is d(half_sinc)/da divided by a.
double half_sinc_slope(double a) {
  if (a < 1e-4) {
    return -1.0 / 24.0 + a * a / 960.0;
  }
  return (0.5 * a * std::cos(0.5 * a) - std::sin(0.5 * a)) / (a * a * a);
}

struct EffectiveStep {
  double v;  // transverse rotation angle Omega_eff * t_eff
  double w;  // longitudinal angle delta * t_eff
};

EffectiveStep effective_angles(const PulseStep& step, const ErrorParams& errors,
                               double rabi_nominal) {
  const double amp_scale = errors.g_mode == GMode::AmplitudeScale ? 1.0 + errors.g : 1.0;
  const double dur_scale = errors.g_mode == GMode::DurationScale ? 1.0 + errors.g : 1.0;
  const double t_eff = step.duration * dur_scale;
  return {step.amplitude * amp_scale * rabi_nominal * t_eff,
          errors.f * rabi_nominal * t_eff};
}

}  // namespace

double PulseSequence::nominal_area() const {
  double area = 0.0;
  for (const PulseStep& s : steps) area += s.amplitude * rabi_nominal * s.duration;
  return area;
}

double PulseSequence::total_duration() const {
  double t = 0.0;
  for (const PulseStep& s : steps) t += s.duration;
  return t;
}

void PulseSequence::validate() const {
  if (steps.empty()) throw std::invalid_argument("pulse sequence must be non-empty");
  if (!finite(rabi_nominal) || rabi_nominal <= 0.0)
    throw std::invalid_argument("rabi_nominal must be positive and finite");
  for (const PulseStep& s : steps) {
    if (!finite(s.amplitude) || s.amplitude < 0.0)
      throw std::invalid_argument("step amplitude must be >= 0 and finite");
    if (!finite(s.duration) || s.duration < 0.0)
      throw std::invalid_argument("step duration must be >= 0 and finite");
    if (!finite(s.phase)) throw std::invalid_argument("step phase must be finite");
  }
}

Rotation Rotation::operator*(const Rotation& rhs) const {
  Rotation out;
  out.u00 = u00 * rhs.u00 + u01 * rhs.u10;
  out.u01 = u00 * rhs.u01 + u01 * rhs.u11;
  out.u10 = u10 * rhs.u00 + u11 * rhs.u10;
  out.u11 = u10 * rhs.u01 + u11 * rhs.u11;
  return out;
}

Rotation Rotation::dagger() const {
  Rotation out;
  out.u00 = std::conj(u00);
  out.u01 = std::conj(u10);
  out.u10 = std::conj(u01);
  out.u11 = std::conj(u11);
  return out;
}

std::array<Complex, 2> Rotation::apply(const std::array<Complex, 2>& c) const {
  return {u00 * c[0] + u01 * c[1], u10 * c[0] + u11 * c[1]};
}

double Rotation::unitarity_defect() const {
  const Rotation p = dagger() * (*this);
  double d = std::abs(p.u00 - Complex{1.0, 0.0});
  d = std::max(d, std::abs(p.u01));
  d = std::max(d, std::abs(p.u10));
  d = std::max(d, std::abs(p.u11 - Complex{1.0, 0.0}));
  return d;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

QubitState QubitState::ket0() { return pure({1.0, 0.0}, {0.0, 0.0}); }

QubitState QubitState::ket1() { return pure({0.0, 0.0}, {1.0, 0.0}); }

QubitState QubitState::pure(Complex c0, Complex c1) {
  const double n = std::sqrt(std::norm(c0) + std::norm(c1));
  if (!finite(n) || n < 1e-15)
    throw std::invalid_argument("pure state amplitudes must have nonzero finite norm");
  QubitState s;
  s.pure_ = true;
  s.amp_ = {c0 / n, c1 / n};
  return s;
}

QubitState QubitState::from_angles(double theta, double phi) {
  return pure(Complex{std::cos(0.5 * theta), 0.0},
              std::polar(std::sin(0.5 * theta), phi));
}

QubitState QubitState::mixed(double rho00, Complex rho01, double rho11) {
  constexpr double tol = 1e-9;
  if (std::abs(rho00 + rho11 - 1.0) > tol)
    throw std::invalid_argument("density matrix trace must be 1");
  if (rho00 < -tol || rho11 < -tol)
    throw std::invalid_argument("density matrix diagonal must be nonnegative");
  if (rho00 * rho11 - std::norm(rho01) < -tol)
    throw std::invalid_argument("density matrix must be positive semidefinite");
  QubitState s;
  s.pure_ = false;
  s.rho_ = {Complex{rho00, 0.0}, rho01, std::conj(rho01), Complex{rho11, 0.0}};
  return s;
}

Complex QubitState::c0() const {
  if (!pure_) throw std::logic_error("amplitudes undefined for mixed state");
  return amp_[0];
}

Complex QubitState::c1() const {
  if (!pure_) throw std::logic_error("amplitudes undefined for mixed state");
  return amp_[1];
}

Complex QubitState::rho(int row, int col) const {
  if (pure_) return amp_[row] * std::conj(amp_[col]);
  return rho_[2 * row + col];
}

double QubitState::population_one() const { return rho(1, 1).real(); }

double QubitState::trace() const { return rho(0, 0).real() + rho(1, 1).real(); }

double QubitState::norm_squared() const {
  if (pure_) return std::norm(amp_[0]) + std::norm(amp_[1]);
  return trace();
}

BlochVector QubitState::bloch_vector() const {
  const Complex r01 = rho(0, 1);
  return {2.0 * r01.real(), -2.0 * r01.imag(), rho(0, 0).real() - rho(1, 1).real()};
}

QubitState QubitState::applied(const Rotation& u) const {
  QubitState out;
  if (pure_) {
    out.pure_ = true;
    out.amp_ = u.apply(amp_);
    return out;
  }
  // U rho U^dag
  const Rotation ud = u.dagger();
  const std::array<Complex, 2> row0 = {rho_[0], rho_[1]};
  const std::array<Complex, 2> row1 = {rho_[2], rho_[3]};
  // tmp = rho * U^dag
  const std::array<Complex, 4> tmp = {
      row0[0] * ud.u00 + row0[1] * ud.u10, row0[0] * ud.u01 + row0[1] * ud.u11,
      row1[0] * ud.u00 + row1[1] * ud.u10, row1[0] * ud.u01 + row1[1] * ud.u11};
  out.pure_ = false;
  out.rho_ = {u.u00 * tmp[0] + u.u01 * tmp[2], u.u00 * tmp[1] + u.u01 * tmp[3],
              u.u10 * tmp[0] + u.u11 * tmp[2], u.u10 * tmp[1] + u.u11 * tmp[3]};
  return out;
}

Rotation step_propagator(const PulseStep& step, const ErrorParams& errors,
                         double rabi_nominal) {
  const auto [v, w] = effective_angles(step, errors, rabi_nominal);
  const double alpha = std::hypot(v, w);
  const double c = std::cos(0.5 * alpha);
  const double k = half_sinc(alpha);
  const Complex em = std::polar(1.0, -step.phase);
  Rotation u;
  u.u00 = Complex{c, -k * w};
  u.u01 = Complex{0.0, -k * v} * em;
  u.u10 = Complex{0.0, -k * v} * std::conj(em);
  u.u11 = Complex{c, k * w};
  return u;
}

Rotation sequence_propagator(const PulseSequence& seq, const ErrorParams& errors) {
  Rotation u = Rotation::identity();
  for (const PulseStep& s : seq.steps) u = step_propagator(s, errors, seq.rabi_nominal) * u;
  return u;
}

QubitState propagate(const PulseSequence& seq, const ErrorParams& errors,
                     const QubitState& initial) {
  seq.validate();
  return initial.applied(sequence_propagator(seq, errors));
}

BlochAngles bloch_angles(const QubitState& state) {
  if (state.is_pure()) {
    const Complex c0 = state.c0();
    const Complex c1 = state.c1();
    const double a0 = std::abs(c0);
    const double a1 = std::abs(c1);
    BlochAngles out;
    out.theta = 2.0 * std::atan2(a1, a0);
    if (a0 == 0.0 || a1 == 0.0) {
      out.phi = 0.0;  // pole convention
      return out;
    }
    double phi = std::arg(c1) - std::arg(c0);
    if (phi > kPi) phi -= kTwoPi;
    if (phi < -kPi) phi += kTwoPi;
    out.phi = phi;
    return out;
  }
  const BlochVector r = state.bloch_vector();
  const double n = r.norm();
  if (n < 1e-9)
    throw DegenerateStateError("Bloch vector is numerically zero; direction undefined");
  const double rxy = std::hypot(r.x, r.y);
  BlochAngles out;
  out.theta = std::atan2(rxy, r.z);
  out.phi = rxy == 0.0 ? 0.0 : std::atan2(r.y, r.x);
  return out;
}

StepDerivatives step_propagator_derivatives(const PulseStep& step,
                                            const ErrorParams& errors,
                                            double rabi_nominal) {
  const double amp_scale = errors.g_mode == GMode::AmplitudeScale ? 1.0 + errors.g : 1.0;
  const double dur_scale = errors.g_mode == GMode::DurationScale ? 1.0 + errors.g : 1.0;
  const double t_eff = step.duration * dur_scale;
  const double dv_damp = amp_scale * rabi_nominal * t_eff;
  const double v = step.amplitude * dv_damp;
  const double w = errors.f * rabi_nominal * t_eff;
  const double alpha = std::hypot(v, w);
  const double c = std::cos(0.5 * alpha);
  const double k = half_sinc(alpha);
  const double m = half_sinc_slope(alpha);
  const Complex em = std::polar(1.0, -step.phase);
  const Complex ep = std::conj(em);

  StepDerivatives out;
  out.u.u00 = Complex{c, -k * w};
  out.u.u01 = Complex{0.0, -k * v} * em;
  out.u.u10 = Complex{0.0, -k * v} * ep;
  out.u.u11 = Complex{c, k * w};

  // dU/dv, arranged as products that stay finite at alpha -> 0:
  // dc/dv = -(v/2) k, dk/dv = m v.
  const Complex d00 = Complex{-0.5 * v * k, -w * m * v};
  const Complex doff = Complex{0.0, -(k + v * v * m)};
  out.du_damplitude = {dv_damp * d00, dv_damp * doff * em,
                       dv_damp * doff * ep, dv_damp * std::conj(d00)};

  out.du_dphase = {Complex{0.0, 0.0}, Complex{-k * v, 0.0} * em,
                   Complex{k * v, 0.0} * ep, Complex{0.0, 0.0}};
  return out;
}

}  // namespace qpulse
