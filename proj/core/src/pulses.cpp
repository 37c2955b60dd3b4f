#include "qpulse/pulses.hpp"

#include <cmath>
#include <stdexcept>

namespace qpulse {

namespace {

PulseStep segment(double area_rad, double phase, double rabi_nominal) {
  return {1.0, phase, area_rad / rabi_nominal};
}

void require_rabi(double rabi_nominal) {
  if (!(rabi_nominal > 0.0) || !std::isfinite(rabi_nominal))
    throw std::invalid_argument("rabi_nominal must be positive and finite");
}

}  // namespace

void CompositeSpec::validate() const {
  if (!(target_theta > 0.0) || target_theta > kTwoPi + 1e-12)
    throw std::invalid_argument("target_theta must lie in (0, 2pi]");
  if (family == PulseFamily::CorpsePi || family == PulseFamily::ScrofulousPi) {
    if (std::abs(target_theta - kPi) > 1e-12)
      throw std::invalid_argument(
          "CORPSE and SCROFULOUS are provided for theta = pi only");
  }
  if (family == PulseFamily::Rectangular && rect_steps < 1)
    throw std::invalid_argument("rectangular pulse needs at least one step");
}

PulseSequence rectangular(double theta, double phi, double rabi_nominal,
                          std::size_t n_steps) {
  require_rabi(rabi_nominal);
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  PulseSequence seq;
  seq.rabi_nominal = rabi_nominal;
  const double step_duration = theta / (rabi_nominal * static_cast<double>(n_steps));
  seq.steps.assign(n_steps, {1.0, phi, step_duration});
  return seq;
}

PulseSequence corpse_pi(double phi, double rabi_nominal) {
  require_rabi(rabi_nominal);
  PulseSequence seq;
  seq.rabi_nominal = rabi_nominal;
  seq.steps = {segment(deg_to_rad(420.0), phi, rabi_nominal),
               segment(deg_to_rad(300.0), phi + kPi, rabi_nominal),
               segment(deg_to_rad(60.0), phi, rabi_nominal)};
  return seq;
}

PulseSequence scrofulous_pi(double phi, double rabi_nominal) {
  require_rabi(rabi_nominal);
  PulseSequence seq;
  seq.rabi_nominal = rabi_nominal;
  seq.steps = {segment(deg_to_rad(180.0), phi + deg_to_rad(60.0), rabi_nominal),
               segment(deg_to_rad(180.0), phi + deg_to_rad(300.0), rabi_nominal),
               segment(deg_to_rad(180.0), phi + deg_to_rad(60.0), rabi_nominal)};
  return seq;
}

PulseSequence bb1(double theta, double phi, Bb1Placement placement,
                  double rabi_nominal) {
  require_rabi(rabi_nominal);
  if (!(theta > 0.0) || theta > kTwoPi + 1e-12)
    throw std::invalid_argument("theta must lie in (0, 2pi]");
  const double ratio = theta / (4.0 * kPi);
  if (ratio > 1.0) throw std::invalid_argument("theta/(4 pi) exceeds 1; W phase undefined");
  const double phi1 = std::acos(-ratio);
  const double phi2 = 3.0 * phi1;

  PulseSequence seq;
  seq.rabi_nominal = rabi_nominal;
  const auto w_block = {segment(deg_to_rad(180.0), phi + phi1, rabi_nominal),
                        segment(deg_to_rad(360.0), phi + phi2, rabi_nominal),
                        segment(deg_to_rad(180.0), phi + phi1, rabi_nominal)};
  switch (placement) {
    case Bb1Placement::WBefore:
      seq.steps.assign(w_block);
      seq.steps.push_back(segment(theta, phi, rabi_nominal));
      break;
    case Bb1Placement::WAfter:
      seq.steps.push_back(segment(theta, phi, rabi_nominal));
      seq.steps.insert(seq.steps.end(), w_block);
      break;
    case Bb1Placement::Split:
      seq.steps.push_back(segment(0.5 * theta, phi, rabi_nominal));
      seq.steps.insert(seq.steps.end(), w_block);
      seq.steps.push_back(segment(0.5 * theta, phi, rabi_nominal));
      break;
  }
  return seq;
}

PulseSequence build_pulse(const CompositeSpec& spec, double rabi_nominal) {
  spec.validate();
  switch (spec.family) {
    case PulseFamily::Rectangular:
      return rectangular(spec.target_theta, spec.target_phi, rabi_nominal,
                         spec.rect_steps);
    case PulseFamily::CorpsePi:
      return corpse_pi(spec.target_phi, rabi_nominal);
    case PulseFamily::ScrofulousPi:
      return scrofulous_pi(spec.target_phi, rabi_nominal);
    case PulseFamily::BB1:
      return bb1(spec.target_theta, spec.target_phi, spec.bb1_placement,
                 rabi_nominal);
  }
  throw std::logic_error("unknown pulse family");
}

}  // namespace qpulse
