#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qpulse/fidelity.hpp"
#include "qpulse/qubit.hpp"

namespace qpulse {

/// Discrete (f, g) error ensemble the design is averaged over. weights may be
/// empty (uniform) or one nonnegative entry per (f, g) pair, f index major,
/// normalized to sum 1.
struct EnsembleSpec {
  std::vector<double> f_samples;
  std::vector<double> g_samples;
  std::vector<double> weights;
  GMode g_mode = GMode::AmplitudeScale;

  std::size_t size() const { return f_samples.size() * g_samples.size(); }
  void validate() const;
  std::vector<double> normalized_weights() const;

  static EnsembleSpec uniform_box(double f_min, double f_max, std::size_t nf,
                                  double g_min, double g_max, std::size_t ng,
                                  GMode g_mode = GMode::AmplitudeScale);
};

struct DesignProblem {
  TargetRotation target;
  std::size_t n_steps = 200;
  double step_duration = 0.5;  // us
  double rabi_nominal = kRabiNominal;
  double max_amplitude = 1.0;
  EnsembleSpec ensemble;
  int max_iterations = 2000;
  double convergence_tol = 1e-8;

  void validate() const;
};

/// Initial control guess for the optimizer.
struct DesignInit {
  enum class Kind { Random, Rectangular, Provided };
  Kind kind = Kind::Random;
  std::uint64_t seed = 0;
  PulseSequence provided;

  static DesignInit random(std::uint64_t seed) { return {Kind::Random, seed, {}}; }
  static DesignInit rectangular() { return {Kind::Rectangular, 0, {}}; }
  static DesignInit from_sequence(PulseSequence seq) {
    return {Kind::Provided, 0, std::move(seq)};
  }
};

enum class DesignStatus { Converged, MaxIterations, NoImprovement };

/// Optimization variables: the native (amplitude, phase) controls, or the
/// (x, y) quadratures whose gradients stay conditioned near zero amplitude.
enum class ControlParameterization { AmplitudePhase, Quadrature };

struct DesignReport {
  PulseSequence sequence;
  std::vector<double> cost_history;  // cost after each accepted iteration; [0] is the initial cost
  std::vector<double> member_fidelities;
  DesignStatus status = DesignStatus::Converged;
  double gradient_norm = 0.0;  // at exit

  bool converged() const { return status == DesignStatus::Converged; }
  double final_cost() const { return cost_history.back(); }
};

/// Weighted mean over the ensemble of the state fidelity of the propagated
/// |0> against the target.
double ensemble_cost(const PulseSequence& seq, const DesignProblem& problem);

/// Exact analytic gradient of ensemble_cost with respect to every step's
/// (amplitude, phase), via one forward/backward pass per ensemble member.
/// Members are evaluated in parallel and accumulated in a fixed order.
struct CostGradient {
  double cost = 0.0;
  std::vector<double> d_amplitude;
  std::vector<double> d_phase;

  double norm() const;
};

CostGradient cost_gradient(const PulseSequence& seq, const DesignProblem& problem);

/// Projected gradient ascent with Armijo backtracking. Amplitudes are kept in
/// [0, max_amplitude] by projection after each trial step; accepted
/// iterations never decrease the cost. Stops when the accepted improvement
/// falls below convergence_tol (Converged), at max_iterations
/// (MaxIterations), or when no improving step exists at iteration 0
/// (NoImprovement; reported, not fatal).
DesignReport design_pulse(const DesignProblem& problem, const DesignInit& init,
                          ControlParameterization parameterization =
                              ControlParameterization::Quadrature);

}  // namespace qpulse
