#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace qpulse {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// 2pi x 10 kHz expressed in rad/us; the nominal drive strength of the
/// reference setup. Time is microseconds throughout, angular frequency rad/us.
inline constexpr double kRabiNominal = 0.062831853071795868;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// How the area error g is realized physically: scaling the drive amplitude
/// by (1+g), or stretching every step duration by (1+g). Both give actual
/// area (1+g) * nominal; they differ off resonance.
enum class GMode { AmplitudeScale, DurationScale };

/// One piecewise-constant segment of the drive.
/// amplitude is relative (1.0 = nominal Rabi frequency), phase in rad,
/// duration in us. Phase is stored as given; it is only canonicalized
/// into [0, 2pi) when serialized.
struct PulseStep {
  double amplitude = 1.0;
  double phase = 0.0;
  double duration = 0.0;
};

struct PulseSequence {
  std::vector<PulseStep> steps;
  double rabi_nominal = kRabiNominal;

  /// Unperturbed area: sum of amplitude * rabi_nominal * duration.
  double nominal_area() const;
  double total_duration() const;

  /// Throws std::invalid_argument on empty sequence, negative durations or
  /// amplitudes, non-finite entries, or rabi_nominal <= 0.
  void validate() const;
};

/// The controlled error pair. The detuning is always f * rabi_nominal,
/// independent of g and of the step amplitude; g scales either amplitude
/// or duration according to g_mode.
struct ErrorParams {
  double f = 0.0;
  double g = 0.0;
  GMode g_mode = GMode::AmplitudeScale;
};

/// 2x2 special unitary acting on (c0, c1).
struct Rotation {
  Complex u00{1.0, 0.0}, u01{0.0, 0.0}, u10{0.0, 0.0}, u11{1.0, 0.0};

  static Rotation identity() { return {}; }

  /// Composition; (a * b) applies b first, then a.
  Rotation operator*(const Rotation& rhs) const;
  Rotation dagger() const;

  std::array<Complex, 2> apply(const std::array<Complex, 2>& c) const;

  /// max-norm of U^dag U - I.
  double unitarity_defect() const;
};

struct BlochVector {
  double x = 0.0, y = 0.0, z = 0.0;
  double norm() const;
};

/// Polar/azimuthal angles of a state on the Bloch sphere:
/// |theta,phi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, |0> at +z.
struct BlochAngles {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [-pi, pi]
};

/// Pure amplitude pair or 2x2 density matrix of the two-level system.
class QubitState {
 public:
  static QubitState ket0();
  static QubitState ket1();

  /// Normalizes the amplitudes; throws std::invalid_argument on a zero vector.
  static QubitState pure(Complex c0, Complex c1);

  /// |theta,phi> with the convention above.
  static QubitState from_angles(double theta, double phi);

  /// Density matrix from rho00, rho01 (rho10 = conj), rho11. Validates unit
  /// trace, Hermiticity and positivity to 1e-9.
  static QubitState mixed(double rho00, Complex rho01, double rho11);

  bool is_pure() const { return pure_; }

  /// Pure amplitudes; throw std::logic_error on mixed states.
  Complex c0() const;
  Complex c1() const;

  /// Density-matrix entry, defined for both representations.
  Complex rho(int row, int col) const;

  /// <1|rho|1>.
  double population_one() const;
  double trace() const;
  double norm_squared() const;  // pure norm, or trace for mixed

  BlochVector bloch_vector() const;

  /// U|psi> for pure states, U rho U^dag for mixed.
  QubitState applied(const Rotation& u) const;

 private:
  QubitState() = default;
  bool pure_ = true;
  std::array<Complex, 2> amp_{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
  std::array<Complex, 4> rho_{};  // row-major, valid when !pure_
};

/// Closed-form constant-step propagator U = exp(-i H t) with
/// H = (delta/2) sigma_z + (Omega/2)(sigma_x cos Phi + sigma_y sin Phi),
/// Omega = (1+g_amp) * amplitude * rabi_nominal, delta = f * rabi_nominal,
/// t = (1+g_dur) * duration. Phi = 0 rotates about +x, Phi = pi/2 about +y.
Rotation step_propagator(const PulseStep& step, const ErrorParams& errors,
                         double rabi_nominal);

/// Product of step propagators in time order.
Rotation sequence_propagator(const PulseSequence& seq, const ErrorParams& errors);

QubitState propagate(const PulseSequence& seq, const ErrorParams& errors,
                     const QubitState& initial);

/// Bloch angles of a state. For mixed states the direction of the Bloch
/// vector is used; throws DegenerateStateError when its length is below
/// 1e-9. phi is 0 by convention at the poles.
BlochAngles bloch_angles(const QubitState& state);

/// Step propagator together with entry-wise derivatives of U with respect to
/// the step amplitude and phase (exact, including the error scaling).
/// Derivative matrices are not unitary; entries are row-major.
struct StepDerivatives {
  Rotation u;
  std::array<Complex, 4> du_damplitude{};
  std::array<Complex, 4> du_dphase{};
};

StepDerivatives step_propagator_derivatives(const PulseStep& step,
                                            const ErrorParams& errors,
                                            double rabi_nominal);

}  // namespace qpulse
