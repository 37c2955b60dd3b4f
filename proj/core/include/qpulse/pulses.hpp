#pragma once

#include <cstddef>

#include "qpulse/qubit.hpp"

namespace qpulse {

enum class PulseFamily { Rectangular, CorpsePi, ScrofulousPi, BB1 };

/// Where the compensating W block sits relative to the rotation it protects:
/// WBefore = W-R(theta), WAfter = R(theta)-W, Split = R(theta/2)-W-R(theta/2).
enum class Bb1Placement { WBefore, WAfter, Split };

struct CompositeSpec {
  PulseFamily family = PulseFamily::Rectangular;
  double target_theta = kPi;
  double target_phi = 0.0;  // overall drive phase offset
  Bb1Placement bb1_placement = Bb1Placement::Split;
  std::size_t rect_steps = 1;  // only for Rectangular

  /// Throws std::invalid_argument when target_theta is outside (0, 2pi], or
  /// when a CORPSE/SCROFULOUS spec asks for theta != pi.
  void validate() const;
};

/// n_steps equal segments of amplitude 1 and phase phi with total nominal
/// area theta.
PulseSequence rectangular(double theta, double phi, double rabi_nominal,
                          std::size_t n_steps = 1);

/// Three segments of 420, 300 and 60 degrees at phases (phi, phi+pi, phi).
/// Net pi rotation about azimuth phi on resonance; first-order insensitive
/// to detuning.
PulseSequence corpse_pi(double phi, double rabi_nominal);

/// Three 180-degree segments at phases (phi+60, phi+300, phi+60) degrees.
/// Net pi rotation about azimuth phi on resonance; first-order insensitive
/// to pulse-area error.
PulseSequence scrofulous_pi(double phi, double rabi_nominal);

/// Target rotation R(theta) about azimuth phi protected by the broadband
/// block W = 180_{phi1} 360_{3 phi1} 180_{phi1}, phi1 = acos(-theta/(4 pi))
/// relative to phi. W is the identity on resonance.
PulseSequence bb1(double theta, double phi, Bb1Placement placement,
                  double rabi_nominal);

/// Dispatch on a CompositeSpec.
PulseSequence build_pulse(const CompositeSpec& spec, double rabi_nominal);

}  // namespace qpulse
