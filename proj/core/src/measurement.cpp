#include "qpulse/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "qpulse/errors.hpp"
#include "qpulse/pulses.hpp"
#include "qpulse/rng.hpp"

namespace qpulse {

namespace {

/// The analysis pulse of the Ramsey sequence: an ideal resonant pi/2 whose
/// rotation axis sits at azimuth Phi + pi/2, so that the detected population
/// reads the Bloch component along azimuth Phi and the fringe follows
/// (1 + sin(theta_m) cos(phi_m - Phi)) / 2.
Rotation analysis_propagator(double fringe_phase, double rabi_nominal) {
  const PulseSequence seq = rectangular(0.5 * kPi, fringe_phase + 0.5 * kPi, rabi_nominal);
  return sequence_propagator(seq, {});
}

/// Bernoulli counting with preparation and detection-flip draws. p_from0 and
/// p_from1 are the |1> detection probabilities for the two preparations.
long count_shots(RandomStream& rng, const ExperimentConfig& cfg, double p_from0,
                 double p_from1) {
  long count = 0;
  for (long s = 0; s < cfg.shots_per_point; ++s) {
    const bool started_in_one = rng.bernoulli(cfg.prep.a1);
    bool detected_one = rng.bernoulli(started_in_one ? p_from1 : p_from0);
    if (cfg.detection_flip_prob > 0.0 && rng.bernoulli(cfg.detection_flip_prob))
      detected_one = !detected_one;
    if (detected_one) ++count;
  }
  return count;
}

TransferEstimate estimate_from_count(long count, long shots) {
  TransferEstimate est;
  est.count = count;
  est.shots = shots;
  est.p_one = static_cast<double>(count) / static_cast<double>(shots);
  est.sigma = std::sqrt(est.p_one * (1.0 - est.p_one) / static_cast<double>(shots));
  return est;
}

double wrap_pi(double x) {
  while (x > kPi) x -= kTwoPi;
  while (x < -kPi) x += kTwoPi;
  return x;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (shots_per_point < 1) throw std::invalid_argument("shots_per_point must be >= 1");
  if (n_phases < 3) throw std::invalid_argument("n_phases must be >= 3 for identifiability");
  if (!(detection_flip_prob >= 0.0) || detection_flip_prob > 1.0)
    throw std::invalid_argument("detection_flip_prob must lie in [0, 1]");
  prep.validate();
}

TransferEstimate run_transfer_experiment(const PulseSequence& seq,
                                         const ErrorParams& errors,
                                         const ExperimentConfig& cfg) {
  seq.validate();
  cfg.validate();
  const Rotation u = sequence_propagator(seq, errors);
  const double p_from0 = std::norm(u.u10);
  const double p_from1 = std::norm(u.u11);
  RandomStream rng = RandomStream::derived(cfg.rng_seed, 0);
  return estimate_from_count(count_shots(rng, cfg, p_from0, p_from1),
                             cfg.shots_per_point);
}

FringeData run_ramsey_experiment(const PulseSequence& first_pulse,
                                 const ErrorParams& errors,
                                 const ExperimentConfig& cfg) {
  first_pulse.validate();
  cfg.validate();
  const Rotation u_first = sequence_propagator(first_pulse, errors);
  FringeData data;
  data.shots = cfg.shots_per_point;
  data.phases.resize(cfg.n_phases);
  data.counts_one.resize(cfg.n_phases);
  for (int k = 0; k < cfg.n_phases; ++k) {
    const double phi = kTwoPi * k / cfg.n_phases;
    const Rotation u = analysis_propagator(phi, first_pulse.rabi_nominal) * u_first;
    const double p_from0 = std::norm(u.u10);
    const double p_from1 = std::norm(u.u11);
    RandomStream rng = RandomStream::derived(cfg.rng_seed, static_cast<std::uint64_t>(k));
    data.phases[k] = phi;
    data.counts_one[k] = count_shots(rng, cfg, p_from0, p_from1);
  }
  return data;
}

double ramsey_expectation(const QubitState& after_first_pulse, double fringe_phase,
                          double rabi_nominal) {
  return after_first_pulse.applied(analysis_propagator(fringe_phase, rabi_nominal))
      .population_one();
}

std::vector<double> ramsey_expected_fringe(const PulseSequence& first_pulse,
                                           const ErrorParams& errors,
                                           const Preparation& prep, int n_phases) {
  const QubitState mid = propagate(first_pulse, errors, prepared_state(prep));
  std::vector<double> fringe(n_phases);
  for (int k = 0; k < n_phases; ++k)
    fringe[k] = ramsey_expectation(mid, kTwoPi * k / n_phases, first_pulse.rabi_nominal);
  return fringe;
}

TransferEstimate run_preparation_monitor(const ExperimentConfig& cfg) {
  cfg.validate();
  RandomStream rng =
      RandomStream::derived(cfg.rng_seed, static_cast<std::uint64_t>(cfg.n_phases));
  return estimate_from_count(count_shots(rng, cfg, 0.0, 1.0), cfg.shots_per_point);
}

TransferEstimate run_detection_control(const ExperimentConfig& cfg,
                                       double rabi_nominal) {
  cfg.validate();
  const PulseSequence seq = rectangular(0.5 * kPi, 0.0, rabi_nominal);
  const Rotation u = sequence_propagator(seq, {});
  RandomStream rng =
      RandomStream::derived(cfg.rng_seed, static_cast<std::uint64_t>(cfg.n_phases) + 1);
  return estimate_from_count(
      count_shots(rng, cfg, std::norm(u.u10), std::norm(u.u11)), cfg.shots_per_point);
}

FitResult fit_fringe(const FringeData& data, double contrast) {
  const std::size_t n = data.phases.size();
  if (n != data.counts_one.size())
    throw std::invalid_argument("fringe phase and count arrays differ in length");
  if (n < 3) throw std::invalid_argument("fringe fit needs at least 3 phases");
  if (data.shots < 1) throw std::invalid_argument("fringe shots must be >= 1");
  if (!(contrast > 0.0)) throw std::invalid_argument("contrast must be positive");

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = static_cast<double>(data.counts_one[i]) / static_cast<double>(data.shots);

  // Fourier projection onto {1, cos, sin} as the initial guess; exact for
  // equally spaced phases.
  double a = 0.0, pc = 0.0, ps = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a += y[i];
    pc += y[i] * std::cos(data.phases[i]);
    ps += y[i] * std::sin(data.phases[i]);
  }
  a /= static_cast<double>(n);
  pc *= 2.0 / static_cast<double>(n);
  ps *= 2.0 / static_cast<double>(n);
  double b = std::hypot(pc, ps);
  double phi = std::atan2(ps, pc);

  const auto ssr_at = [&](double pa, double pb, double pphi) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (pa + pb * std::cos(data.phases[i] - pphi));
      ssr += r * r;
    }
    return ssr;
  };

  // Damped Gauss-Newton refinement on (A, B, phi).
  constexpr int kMaxIterations = 200;
  constexpr double kStepTol = 1e-10;
  bool converged = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // normal equations J^T J dp = J^T r
    std::array<double, 9> h{};
    std::array<double, 3> g{};
    for (std::size_t i = 0; i < n; ++i) {
      const double cosd = std::cos(data.phases[i] - phi);
      const double sind = std::sin(data.phases[i] - phi);
      const double j[3] = {1.0, cosd, b * sind};
      const double r = y[i] - (a + b * cosd);
      for (int p = 0; p < 3; ++p) {
        g[p] += j[p] * r;
        for (int q = 0; q < 3; ++q) h[3 * p + q] += j[p] * j[q];
      }
    }
    // 3x3 solve by Gaussian elimination with partial pivoting
    std::array<double, 12> m{h[0], h[1], h[2], g[0], h[3], h[4], h[5], g[1],
                             h[6], h[7], h[8], g[2]};
    bool singular = false;
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int row = col + 1; row < 3; ++row)
        if (std::abs(m[4 * row + col]) > std::abs(m[4 * piv + col])) piv = row;
      if (std::abs(m[4 * piv + col]) < 1e-300) {
        singular = true;
        break;
      }
      if (piv != col)
        for (int c2 = 0; c2 < 4; ++c2) std::swap(m[4 * piv + c2], m[4 * col + c2]);
      for (int row = 0; row < 3; ++row) {
        if (row == col) continue;
        const double factor = m[4 * row + col] / m[4 * col + col];
        for (int c2 = col; c2 < 4; ++c2) m[4 * row + c2] -= factor * m[4 * col + c2];
      }
    }
    if (singular) {
      converged = true;  // flat direction: amplitude at zero, handled below
      break;
    }
    const double da = m[3] / m[0], db = m[7] / m[5], dphi = m[11] / m[10];

    const double ssr0 = ssr_at(a, b, phi);
    double t = 1.0;
    for (int halvings = 0; halvings < 30; ++halvings) {
      if (ssr_at(a + t * da, b + t * db, phi + t * dphi) <= ssr0) break;
      t *= 0.5;
    }
    a += t * da;
    b += t * db;
    phi += t * dphi;
    if (std::max({std::abs(t * da), std::abs(t * db), std::abs(t * dphi)}) < kStepTol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw FitConvergenceError("fringe fit did not converge in 200 iterations");

  if (b < 0.0) {
    b = -b;
    phi += kPi;
  }
  phi = wrap_pi(phi);

  // covariance from the SSR-scaled normal equations
  double ssr = ssr_at(a, b, phi);
  const double dof = static_cast<double>(n) - 3.0;
  const double var_scale = dof > 0.0 ? ssr / dof : 0.0;
  double s_a = 0.0, s_b = 0.0, s_phi = 0.0;
  {
    double h00 = 0, h11 = 0, h22 = 0, h01 = 0, h02 = 0, h12 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double cosd = std::cos(data.phases[i] - phi);
      const double sind = std::sin(data.phases[i] - phi);
      const double j1 = cosd, j2 = b * sind;
      h00 += 1.0;
      h11 += j1 * j1;
      h22 += j2 * j2;
      h01 += j1;
      h02 += j2;
      h12 += j1 * j2;
    }
    // inverse diagonal of the symmetric 3x3 via cofactors
    const double det = h00 * (h11 * h22 - h12 * h12) - h01 * (h01 * h22 - h12 * h02) +
                       h02 * (h01 * h12 - h11 * h02);
    if (std::abs(det) > 1e-300) {
      s_a = std::sqrt(std::max(0.0, var_scale * (h11 * h22 - h12 * h12) / det));
      s_b = std::sqrt(std::max(0.0, var_scale * (h00 * h22 - h02 * h02) / det));
      s_phi = std::sqrt(std::max(0.0, var_scale * (h00 * h11 - h01 * h01) / det));
    }
  }

  FitResult fit;
  fit.offset = a;
  fit.amplitude = b;
  fit.degenerate = b < std::max(3.0 * s_b, 1e-12);
  const double s = std::clamp(2.0 * b / contrast, 0.0, 1.0);
  fit.theta_m = std::asin(s);
  fit.phi_m = phi;
  const double cos_theta = std::sqrt(std::max(1.0 - s * s, 0.0));
  fit.sigma_theta = 2.0 * s_b / contrast / std::max(cos_theta, 1e-6);
  fit.sigma_phi = s_phi;
  return fit;
}

FidelityEstimate fidelity_from_fit(const FitResult& fit, const TargetRotation& target) {
  const BlochAngles measured{fit.theta_m, fit.phi_m};
  FidelityEstimate out;
  out.value = angles_fidelity(target, measured);
  const double df_dtheta =
      0.5 * (-std::cos(target.theta) * std::sin(fit.theta_m) +
             std::sin(target.theta) * std::cos(fit.theta_m) *
                 std::cos(fit.phi_m - target.phi));
  const double df_dphi = -0.5 * std::sin(target.theta) * std::sin(fit.theta_m) *
                         std::sin(fit.phi_m - target.phi);
  out.sigma = std::hypot(df_dtheta * fit.sigma_theta, df_dphi * fit.sigma_phi);
  return out;
}

}  // namespace qpulse
