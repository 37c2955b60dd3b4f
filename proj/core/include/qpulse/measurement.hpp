#pragma once

#include <cstdint>
#include <vector>

#include "qpulse/fidelity.hpp"
#include "qpulse/qubit.hpp"

namespace qpulse {

/// Knobs of the stochastic measurement emulation: per-point shot count,
/// preparation impurity, number of Ramsey phases, the master seed and an
/// optional symmetric detection flip probability.
struct ExperimentConfig {
  long shots_per_point = 700;
  Preparation prep{};
  int n_phases = 20;
  std::uint64_t rng_seed = 0;
  double detection_flip_prob = 0.0;

  void validate() const;  // shots >= 1, n_phases >= 3, flip prob in [0, 1]
};

struct TransferEstimate {
  double p_one = 0.0;  // count / shots
  double sigma = 0.0;  // binomial sqrt(p(1-p)/shots)
  long count = 0;
  long shots = 0;
};

/// Ramsey fringe: detected |1> counts per analysis phase.
struct FringeData {
  std::vector<double> phases;
  std::vector<long> counts_one;
  long shots = 0;
};

/// Fitted fringe parameters. theta_m is the principal branch
/// asin(2 B / contrast) in [0, pi/2]; a fringe determines sin(theta_m) only,
/// so theta_m and pi - theta_m (theta_m_mirror) are indistinguishable.
struct FitResult {
  double theta_m = 0.0;
  double phi_m = 0.0;
  double sigma_theta = 0.0;
  double sigma_phi = 0.0;
  double offset = 0.0;     // fitted A
  double amplitude = 0.0;  // fitted B >= 0
  bool degenerate = false; // B consistent with zero: phi_m not identifiable

  double theta_m_mirror() const { return kPi - theta_m; }
};

struct FidelityEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// Transfer experiment (grid sequences for pi-type pulses): per shot the ion
/// starts in |1> with probability a1, the pulse is applied under the
/// controlled error, and a projective detection (with optional flip) is
/// drawn. Deterministic for a fixed seed.
TransferEstimate run_transfer_experiment(const PulseSequence& seq,
                                         const ErrorParams& errors,
                                         const ExperimentConfig& cfg);

/// Ramsey experiment: the pulse under test runs under the controlled error,
/// then an ideal analysis pi/2 pulse whose fringe phase Phi steps through
/// n_phases values equally spaced over [0, 2pi). For a pure preparation the
/// expected fringe is (1 + sin(theta_m) cos(phi_m - Phi)) / 2.
FringeData run_ramsey_experiment(const PulseSequence& first_pulse,
                                 const ErrorParams& errors,
                                 const ExperimentConfig& cfg);

/// Exact |1> population after the ideal analysis pulse at fringe phase Phi,
/// starting from the given intermediate state.
double ramsey_expectation(const QubitState& after_first_pulse, double fringe_phase,
                          double rabi_nominal);

/// Noiseless expected fringe of run_ramsey_experiment.
std::vector<double> ramsey_expected_fringe(const PulseSequence& first_pulse,
                                           const ErrorParams& errors,
                                           const Preparation& prep, int n_phases);

/// Preparation monitor (pulse left out): estimates the residual |1>
/// population a1 of the preparation.
TransferEstimate run_preparation_monitor(const ExperimentConfig& cfg);

/// Detection control with an ideal pi/2 pulse; expected value 1/2 regardless
/// of the preparation.
TransferEstimate run_detection_control(const ExperimentConfig& cfg,
                                       double rabi_nominal);

/// Least-squares fit of counts/shots to A + B cos(Phi - phi_m): discrete
/// Fourier projection for the initial guess, then damped Gauss-Newton
/// (bounded to 200 iterations, parameter step tolerance 1e-10; throws
/// FitConvergenceError beyond the bound). theta_m is recovered from
/// sin(theta_m) = 2 B / contrast where contrast is (a0 - a1) from a
/// calibration run, 1 for pure preparation. Uncertainties come from the
/// fit covariance. Requires at least 3 distinct phases.
FitResult fit_fringe(const FringeData& data, double contrast = 1.0);

/// Pure-state fidelity evaluated at the fitted angles, with 1-sigma linear
/// error propagation.
FidelityEstimate fidelity_from_fit(const FitResult& fit, const TargetRotation& target);

}  // namespace qpulse
