#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qpulse/qubit.hpp"

namespace qpulse {

/// The rotation a pulse is supposed to implement, identified with the state
/// |theta,phi> it should produce from |0>.
struct TargetRotation {
  double theta = kPi;
  double phi = 0.0;
  void validate() const;  // theta in [0, pi]
};

/// Initial-state populations after imperfect preparation.
struct Preparation {
  double a0 = 1.0;
  double a1 = 0.0;
  void validate() const;  // a0 + a1 = 1, both in [0, 1]
};

/// Pure |0> when a1 = 0, otherwise the diagonal mixture a0|0><0| + a1|1><1|.
QubitState prepared_state(const Preparation& prep);

/// Bloch angles of the zero-error action of seq on |0>; the reference the
/// grids and fits are scored against.
TargetRotation ideal_target(const PulseSequence& seq);

/// Quantum state fidelity <theta,phi| rho |theta,phi>. For a pi target this
/// reduces to the |1> population.
double state_fidelity(const TargetRotation& target, const QubitState& achieved);

/// Fidelity between a target and measured Bloch angles,
/// (1 + cos(t) cos(tm) + sin(t) sin(tm) cos(pm - p)) / 2.
double angles_fidelity(const TargetRotation& target, const BlochAngles& measured);

/// The pi-transfer contrast convention: detected |1> population minus the
/// a1 preparation baseline. Its ceiling over all pulses is a0 - a1.
double transfer_contrast(double p_one, const Preparation& prep);

struct FidelityGrid {
  std::vector<double> f_axis;  // sorted ascending
  std::vector<double> g_axis;  // sorted ascending
  std::vector<double> values;  // row-major, f index major, g index minor
  double fm = 0.0;             // fidelity at (f=0, g=0)

  std::size_t nf() const { return f_axis.size(); }
  std::size_t ng() const { return g_axis.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * ng() + j]; }
};

struct ThresholdMask {
  std::vector<double> f_axis;
  std::vector<double> g_axis;
  std::vector<std::uint8_t> pass;  // same layout as FidelityGrid::values

  std::size_t nf() const { return f_axis.size(); }
  std::size_t ng() const { return g_axis.size(); }
  bool at(std::size_t i, std::size_t j) const { return pass[i * ng() + j] != 0; }
  std::size_t count() const;
};

/// Exhaustive deterministic sweep: values[i][j] is the state fidelity of the
/// propagated prepared state at (f_i, g_j). Cells are independent and are
/// evaluated in parallel; the result is identical for any worker count.
FidelityGrid sweep_grid(const PulseSequence& seq, const TargetRotation& target,
                        const Preparation& prep, std::span<const double> f_axis,
                        std::span<const double> g_axis,
                        GMode g_mode = GMode::AmplitudeScale);

/// mask[i][j] = values[i][j] / Fm > ratio. Throws ZeroReferenceError when
/// Fm = 0.
ThresholdMask threshold_mask(const FidelityGrid& grid, double ratio);

/// Bilinear interpolation inside the grid bounding box; exact at the nodes.
/// Throws OutOfBoundsError outside the box (no extrapolation).
double interpolate(const FidelityGrid& grid, double f, double g);

/// Default sweep axes: f in -1..1 step 0.25, g in -0.4..0.4 step 0.1.
std::vector<double> default_f_axis();
std::vector<double> default_g_axis();

}  // namespace qpulse
