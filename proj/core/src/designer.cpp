#include "qpulse/designer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qpulse/parallel.hpp"
#include "qpulse/rng.hpp"

namespace qpulse {

namespace {

std::array<Complex, 2> target_vector(const TargetRotation& target) {
  return {Complex{std::cos(0.5 * target.theta), 0.0},
          std::polar(std::sin(0.5 * target.theta), target.phi)};
}

std::vector<ErrorParams> ensemble_members(const EnsembleSpec& ens) {
  std::vector<ErrorParams> members;
  members.reserve(ens.size());
  for (double f : ens.f_samples)
    for (double g : ens.g_samples) members.push_back({f, g, ens.g_mode});
  return members;
}

std::array<Complex, 2> mat_apply(const std::array<Complex, 4>& m,
                                 const std::array<Complex, 2>& v) {
  return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

Complex inner(const std::array<Complex, 2>& a, const std::array<Complex, 2>& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

/// Per-member fidelity and, when grads != nullptr, its gradient added into
/// per-member slots. Forward states are stored; the costate runs backward.
double member_fidelity_and_gradient(const PulseSequence& seq, const ErrorParams& err,
                                    const std::array<Complex, 2>& target,
                                    std::vector<double>* grad_amp,
                                    std::vector<double>* grad_phase) {
  const std::size_t n = seq.steps.size();
  std::vector<StepDerivatives> derivs;
  std::vector<Rotation> props;
  const bool want_grad = grad_amp != nullptr;
  if (want_grad) {
    derivs.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      derivs[k] = step_propagator_derivatives(seq.steps[k], err, seq.rabi_nominal);
  } else {
    props.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      props[k] = step_propagator(seq.steps[k], err, seq.rabi_nominal);
  }
  const auto prop = [&](std::size_t k) -> const Rotation& {
    return want_grad ? derivs[k].u : props[k];
  };

  std::vector<std::array<Complex, 2>> forward(n + 1);
  forward[0] = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
  for (std::size_t k = 0; k < n; ++k) forward[k + 1] = prop(k).apply(forward[k]);

  const Complex overlap = inner(target, forward[n]);
  const double fidelity = std::norm(overlap);
  if (!want_grad) return fidelity;

  // costate chi_k = (U_n ... U_{k+1})^dag target;
  // dF/dp_k = 2 Re( conj(overlap) <chi_k| dU_k |psi_{k-1}> ).
  std::array<Complex, 2> chi = target;
  for (std::size_t k = n; k-- > 0;) {
    const Complex pref = std::conj(overlap);
    (*grad_amp)[k] +=
        2.0 * (pref * inner(chi, mat_apply(derivs[k].du_damplitude, forward[k]))).real();
    (*grad_phase)[k] +=
        2.0 * (pref * inner(chi, mat_apply(derivs[k].du_dphase, forward[k]))).real();
    chi = prop(k).dagger().apply(chi);
  }
  return fidelity;
}

struct EnsembleEvaluation {
  double cost = 0.0;
  std::vector<double> member_fidelities;
  std::vector<double> grad_amp;
  std::vector<double> grad_phase;
};

EnsembleEvaluation evaluate_ensemble(const PulseSequence& seq,
                                     const DesignProblem& problem, bool want_grad) {
  const std::vector<ErrorParams> members = ensemble_members(problem.ensemble);
  const std::vector<double> weights = problem.ensemble.normalized_weights();
  const std::array<Complex, 2> target = target_vector(problem.target);
  const std::size_t n = seq.steps.size();
  const std::size_t m = members.size();

  std::vector<double> fids(m);
  std::vector<std::vector<double>> ga, gp;
  if (want_grad) {
    ga.assign(m, std::vector<double>(n, 0.0));
    gp.assign(m, std::vector<double>(n, 0.0));
  }
  parallel_for(m, 0, [&](std::size_t i) {
    fids[i] = member_fidelity_and_gradient(seq, members[i], target,
                                           want_grad ? &ga[i] : nullptr,
                                           want_grad ? &gp[i] : nullptr);
  });

  EnsembleEvaluation out;
  out.member_fidelities = fids;
  for (std::size_t i = 0; i < m; ++i) out.cost += weights[i] * fids[i];
  if (want_grad) {
    out.grad_amp.assign(n, 0.0);
    out.grad_phase.assign(n, 0.0);
    // fixed member order keeps the reduction deterministic
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        out.grad_amp[k] += weights[i] * ga[i][k];
        out.grad_phase[k] += weights[i] * gp[i][k];
      }
  }
  return out;
}

PulseSequence initial_sequence(const DesignProblem& problem, const DesignInit& init) {
  PulseSequence seq;
  seq.rabi_nominal = problem.rabi_nominal;
  switch (init.kind) {
    case DesignInit::Kind::Provided:
      seq = init.provided;
      seq.validate();
      if (seq.steps.size() != problem.n_steps)
        throw std::invalid_argument("provided init has the wrong number of steps");
      if (seq.rabi_nominal != problem.rabi_nominal)
        throw std::invalid_argument("provided init has a different rabi_nominal");
      break;
    case DesignInit::Kind::Rectangular: {
      // constant drive realizing the target area over the available time
      const double amp = problem.target.theta /
                         (problem.rabi_nominal * problem.step_duration *
                          static_cast<double>(problem.n_steps));
      if (amp > problem.max_amplitude)
        throw std::invalid_argument(
            "rectangular init needs amplitude above max_amplitude; "
            "increase n_steps or step_duration");
      seq.steps.assign(problem.n_steps, {amp, problem.target.phi, problem.step_duration});
      break;
    }
    case DesignInit::Kind::Random: {
      RandomStream rng(init.seed);
      seq.steps.resize(problem.n_steps);
      for (PulseStep& s : seq.steps) {
        s.amplitude = (0.1 + 0.8 * rng.uniform()) * problem.max_amplitude;
        s.phase = kTwoPi * rng.uniform() - kPi;
        s.duration = problem.step_duration;
      }
      break;
    }
  }
  // durations are fixed by the problem, amplitudes clamped to the cap
  for (PulseStep& s : seq.steps) {
    s.duration = problem.step_duration;
    s.amplitude = std::clamp(s.amplitude, 0.0, problem.max_amplitude);
  }
  return seq;
}

/// Optimizer state in either parameterization, convertible to a sequence.
struct Controls {
  ControlParameterization mode;
  std::vector<double> u;  // amplitude or x
  std::vector<double> v;  // phase or y

  static Controls from_sequence(const PulseSequence& seq, ControlParameterization mode) {
    Controls c;
    c.mode = mode;
    const std::size_t n = seq.steps.size();
    c.u.resize(n);
    c.v.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const PulseStep& s = seq.steps[k];
      if (mode == ControlParameterization::AmplitudePhase) {
        c.u[k] = s.amplitude;
        c.v[k] = s.phase;
      } else {
        c.u[k] = s.amplitude * std::cos(s.phase);
        c.v[k] = s.amplitude * std::sin(s.phase);
      }
    }
    return c;
  }

  void write_into(PulseSequence& seq) const {
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (mode == ControlParameterization::AmplitudePhase) {
        seq.steps[k].amplitude = u[k];
        seq.steps[k].phase = v[k];
      } else {
        seq.steps[k].amplitude = std::hypot(u[k], v[k]);
        seq.steps[k].phase = u[k] == 0.0 && v[k] == 0.0 ? 0.0 : std::atan2(v[k], u[k]);
      }
    }
  }

  /// Chain rule from the (amplitude, phase) gradient.
  void gradient_from(const CostGradient& g, const PulseSequence& seq,
                     std::vector<double>& gu, std::vector<double>& gv) const {
    const std::size_t n = u.size();
    gu.resize(n);
    gv.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (mode == ControlParameterization::AmplitudePhase) {
        gu[k] = g.d_amplitude[k];
        gv[k] = g.d_phase[k];
        continue;
      }
      const double amp = seq.steps[k].amplitude;
      if (amp < 1e-12) {
        // d/dx at the origin is the amplitude derivative along phase 0,
        // d/dy along phase pi/2; the phase term vanishes with the amplitude.
        gu[k] = g.d_amplitude[k] * std::cos(seq.steps[k].phase);
        gv[k] = g.d_amplitude[k] * std::sin(seq.steps[k].phase);
        continue;
      }
      const double cp = u[k] / amp;
      const double sp = v[k] / amp;
      gu[k] = g.d_amplitude[k] * cp - g.d_phase[k] * sp / amp;
      gv[k] = g.d_amplitude[k] * sp + g.d_phase[k] * cp / amp;
    }
  }

  void project(double max_amplitude) {
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (mode == ControlParameterization::AmplitudePhase) {
        u[k] = std::clamp(u[k], 0.0, max_amplitude);
      } else {
        const double r = std::hypot(u[k], v[k]);
        if (r > max_amplitude) {
          const double s = max_amplitude / r;
          u[k] *= s;
          v[k] *= s;
        }
      }
    }
  }
};

}  // namespace

void EnsembleSpec::validate() const {
  if (f_samples.empty() || g_samples.empty())
    throw std::invalid_argument("ensemble must have at least one f and one g sample");
  if (!weights.empty()) {
    if (weights.size() != size())
      throw std::invalid_argument("ensemble weights must match f x g sample count");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("ensemble weights must be nonnegative");
      sum += w;
    }
    if (sum <= 0.0) throw std::invalid_argument("ensemble weights must not all vanish");
  }
}

std::vector<double> EnsembleSpec::normalized_weights() const {
  validate();
  std::vector<double> w = weights;
  if (w.empty()) w.assign(size(), 1.0);
  double sum = 0.0;
  for (double x : w) sum += x;
  for (double& x : w) x /= sum;
  return w;
}

EnsembleSpec EnsembleSpec::uniform_box(double f_min, double f_max, std::size_t nf,
                                       double g_min, double g_max, std::size_t ng,
                                       GMode g_mode) {
  if (nf < 1 || ng < 1) throw std::invalid_argument("ensemble needs >= 1 sample per axis");
  EnsembleSpec ens;
  ens.g_mode = g_mode;
  for (std::size_t i = 0; i < nf; ++i)
    ens.f_samples.push_back(nf == 1 ? f_min
                                    : f_min + (f_max - f_min) * static_cast<double>(i) /
                                          static_cast<double>(nf - 1));
  for (std::size_t j = 0; j < ng; ++j)
    ens.g_samples.push_back(ng == 1 ? g_min
                                    : g_min + (g_max - g_min) * static_cast<double>(j) /
                                          static_cast<double>(ng - 1));
  return ens;
}

void DesignProblem::validate() const {
  target.validate();
  ensemble.validate();
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(step_duration > 0.0)) throw std::invalid_argument("step_duration must be positive");
  if (!(rabi_nominal > 0.0)) throw std::invalid_argument("rabi_nominal must be positive");
  if (!(max_amplitude > 0.0)) throw std::invalid_argument("max_amplitude must be positive");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (!(convergence_tol >= 0.0)) throw std::invalid_argument("convergence_tol must be >= 0");
}

double CostGradient::norm() const {
  double s = 0.0;
  for (double x : d_amplitude) s += x * x;
  for (double x : d_phase) s += x * x;
  return std::sqrt(s);
}

double ensemble_cost(const PulseSequence& seq, const DesignProblem& problem) {
  seq.validate();
  problem.validate();
  return evaluate_ensemble(seq, problem, false).cost;
}

CostGradient cost_gradient(const PulseSequence& seq, const DesignProblem& problem) {
  seq.validate();
  problem.validate();
  EnsembleEvaluation eval = evaluate_ensemble(seq, problem, true);
  CostGradient g;
  g.cost = eval.cost;
  g.d_amplitude = std::move(eval.grad_amp);
  g.d_phase = std::move(eval.grad_phase);
  return g;
}

DesignReport design_pulse(const DesignProblem& problem, const DesignInit& init,
                          ControlParameterization parameterization) {
  problem.validate();

  DesignReport report;
  report.sequence = initial_sequence(problem, init);
  Controls controls = Controls::from_sequence(report.sequence, parameterization);
  controls.project(problem.max_amplitude);
  controls.write_into(report.sequence);

  EnsembleEvaluation eval = evaluate_ensemble(report.sequence, problem, true);
  CostGradient grad{eval.cost, std::move(eval.grad_amp), std::move(eval.grad_phase)};
  report.cost_history.push_back(grad.cost);
  report.member_fidelities = std::move(eval.member_fidelities);
  report.status = DesignStatus::MaxIterations;

  std::vector<double> gu, gv;
  controls.gradient_from(grad, report.sequence, gu, gv);

  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;
  double eta = 1.0;
  PulseSequence trial_seq = report.sequence;

  for (int iter = 0; iter < problem.max_iterations; ++iter) {
    Controls trial = controls;
    bool accepted = false;
    double trial_cost = grad.cost;
    EnsembleEvaluation trial_eval;
    for (int h = 0; h < kMaxHalvings; ++h) {
      trial = controls;
      for (std::size_t k = 0; k < trial.u.size(); ++k) {
        trial.u[k] += eta * gu[k];
        trial.v[k] += eta * gv[k];
      }
      trial.project(problem.max_amplitude);
      trial.write_into(trial_seq);
      trial_eval = evaluate_ensemble(trial_seq, problem, true);
      trial_cost = trial_eval.cost;
      // Armijo on the actual (projected) displacement
      double predicted = 0.0;
      for (std::size_t k = 0; k < trial.u.size(); ++k)
        predicted += gu[k] * (trial.u[k] - controls.u[k]) +
                     gv[k] * (trial.v[k] - controls.v[k]);
      if (trial_cost >= grad.cost + kArmijo * predicted && trial_cost >= grad.cost) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      report.status = iter == 0 ? DesignStatus::NoImprovement : DesignStatus::Converged;
      break;
    }
    const double improvement = trial_cost - grad.cost;
    controls = trial;
    report.sequence = trial_seq;
    grad.cost = trial_eval.cost;
    grad.d_amplitude = std::move(trial_eval.grad_amp);
    grad.d_phase = std::move(trial_eval.grad_phase);
    report.member_fidelities = std::move(trial_eval.member_fidelities);
    report.cost_history.push_back(grad.cost);
    controls.gradient_from(grad, report.sequence, gu, gv);
    eta *= 1.7;  // regrow after an accepted step
    if (improvement < problem.convergence_tol) {
      report.status = DesignStatus::Converged;
      break;
    }
  }

  report.gradient_norm = grad.norm();
  return report;
}

}  // namespace qpulse
