#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qpulse/designer.hpp"
#include "qpulse/pulses.hpp"
#include "qpulse/qubit.hpp"

using namespace qpulse;

namespace {

DesignProblem resonant_pi_problem(std::size_t n_steps = 120) {
  DesignProblem problem;
  problem.target = {kPi, 0.0};
  problem.n_steps = n_steps;
  problem.step_duration = 0.5;
  problem.ensemble.f_samples = {0.0};
  problem.ensemble.g_samples = {0.0};
  return problem;
}

PulseSequence random_sequence(std::size_t n, std::mt19937& gen) {
  std::uniform_real_distribution<double> amp(0.1, 0.95);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  PulseSequence seq;
  seq.rabi_nominal = kRabiNominal;
  for (std::size_t k = 0; k < n; ++k) seq.steps.push_back({amp(gen), phase(gen), 2.0});
  return seq;
}

}  // namespace

TEST_CASE("ensemble cost on reference points") {
  DesignProblem problem = resonant_pi_problem(1);
  problem.step_duration = kPi / kRabiNominal;

  const PulseSequence ideal = rectangular(kPi, 0.0, kRabiNominal);
  CHECK(ensemble_cost(ideal, problem) == doctest::Approx(1.0).epsilon(1e-12));

  problem.ensemble.f_samples = {0.0, 1.0};
  CHECK(ensemble_cost(ideal, problem) ==
        doctest::Approx(0.65828191775517697).epsilon(1e-12));  // (1 + P1(f=1))/2

  // all weight on the detuned member reproduces its single fidelity
  problem.ensemble.weights = {0.0, 1.0};
  CHECK(ensemble_cost(ideal, problem) ==
        doctest::Approx(0.31656383551035389).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937 gen(61);
  std::uniform_real_distribution<double> theta(0.2, kPi);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::uniform_real_distribution<double> fdist(-1.0, 1.0);
  std::uniform_real_distribution<double> gdist(-0.4, 0.4);
  std::uniform_int_distribution<int> n_steps(10, 50);

  for (int problem_index = 0; problem_index < 5; ++problem_index) {
    DesignProblem problem;
    problem.target = {theta(gen), phase(gen)};
    problem.n_steps = n_steps(gen);
    problem.step_duration = 2.0;
    problem.ensemble.g_mode =
        problem_index % 2 ? GMode::DurationScale : GMode::AmplitudeScale;
    problem.ensemble.f_samples = {fdist(gen), fdist(gen)};
    problem.ensemble.g_samples = {gdist(gen)};
    std::sort(problem.ensemble.f_samples.begin(), problem.ensemble.f_samples.end());

    PulseSequence seq = random_sequence(problem.n_steps, gen);
    const CostGradient grad = cost_gradient(seq, problem);

    const double h = 1e-6;
    double scale = 0.0;
    for (double v : grad.d_amplitude) scale = std::max(scale, std::abs(v));
    for (double v : grad.d_phase) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < problem.n_steps; ++k) {
      const auto fd = [&](double PulseStep::* field) {
        PulseSequence plus = seq;
        plus.steps[k].*field += h;
        PulseSequence minus = seq;
        minus.steps[k].*field -= h;
        return (ensemble_cost(plus, problem) - ensemble_cost(minus, problem)) /
               (2.0 * h);
      };
      const double fda = fd(&PulseStep::amplitude);
      const double fdp = fd(&PulseStep::phase);
      CAPTURE(problem_index);
      CAPTURE(k);
      CHECK(std::abs(fda - grad.d_amplitude[k]) <
            1e-5 * std::max(std::abs(fda), 1e-3 * scale));
      CHECK(std::abs(fdp - grad.d_phase[k]) <
            1e-5 * std::max(std::abs(fdp), 1e-3 * scale));
    }
  }
}

TEST_CASE("global phase is a gauge direction for transfer targets") {
  std::mt19937 gen(71);
  DesignProblem problem = resonant_pi_problem(12);
  problem.ensemble.f_samples = {-0.4, 0.3};
  problem.ensemble.g_samples = {-0.2, 0.1};
  problem.step_duration = 8.0;
  PulseSequence seq = random_sequence(12, gen);

  const double base = ensemble_cost(seq, problem);
  PulseSequence shifted = seq;
  for (PulseStep& s : shifted.steps) s.phase += 0.37;
  CHECK(std::abs(ensemble_cost(shifted, problem) - base) < 1e-12);

  const CostGradient grad = cost_gradient(seq, problem);
  double gauge = 0.0;
  for (double v : grad.d_phase) gauge += v;
  CHECK(std::abs(gauge) < 1e-10);

  // phase-sensitive target transforms covariantly instead
  problem.target = {0.5 * kPi, -0.5 * kPi};
  const double before = ensemble_cost(seq, problem);
  problem.target.phi += 0.37;
  CHECK(std::abs(ensemble_cost(shifted, problem) - before) < 1e-12);
}

TEST_CASE("resonant pi design from the rectangular init is already optimal") {
  DesignProblem problem = resonant_pi_problem();
  problem.max_iterations = 100;
  const DesignReport report = design_pulse(problem, DesignInit::rectangular());
  CHECK(report.final_cost() > 1.0 - 1e-6);
  CHECK(report.cost_history.size() <= 101);
  CHECK(report.gradient_norm < 1e-8);  // first-order condition at the maximum
  CHECK(report.converged());
}

TEST_CASE("resonant pi design converges from a random init") {
  DesignProblem problem = resonant_pi_problem();
  problem.max_iterations = 500;
  for (const ControlParameterization param :
       {ControlParameterization::Quadrature, ControlParameterization::AmplitudePhase}) {
    const DesignReport report = design_pulse(problem, DesignInit::random(3), param);
    CAPTURE(static_cast<int>(param));
    CHECK(report.final_cost() > 1.0 - 1e-6);
  }
}

TEST_CASE("accepted iterations never decrease the cost and respect the clamp") {
  DesignProblem problem;
  problem.target = {0.5 * kPi, -0.5 * kPi};
  problem.n_steps = 40;
  problem.step_duration = 0.5;
  problem.max_amplitude = 0.8;
  problem.max_iterations = 150;
  problem.ensemble = EnsembleSpec::uniform_box(-0.5, 0.5, 3, -0.2, 0.2, 3);
  const DesignReport report = design_pulse(problem, DesignInit::random(9));
  for (std::size_t i = 1; i < report.cost_history.size(); ++i)
    CHECK(report.cost_history[i] >= report.cost_history[i - 1]);
  for (const PulseStep& s : report.sequence.steps) {
    CHECK(s.amplitude <= 0.8 + 1e-12);
    CHECK(s.amplitude >= 0.0);
  }
  CHECK(report.member_fidelities.size() == 9);
  CHECK(report.final_cost() ==
        doctest::Approx(ensemble_cost(report.sequence, problem)).epsilon(1e-12));
}

TEST_CASE("init handling") {
  DesignProblem problem = resonant_pi_problem(60);
  // rectangular init would need amplitude pi / (rabi * 30us) > 1
  CHECK_THROWS_AS(design_pulse(problem, DesignInit::rectangular()),
                  std::invalid_argument);

  std::mt19937 gen(13);
  PulseSequence wrong = random_sequence(10, gen);
  CHECK_THROWS_AS(design_pulse(problem, DesignInit::from_sequence(wrong)),
                  std::invalid_argument);

  PulseSequence good = random_sequence(60, gen);
  for (PulseStep& s : good.steps) s.duration = problem.step_duration;
  const DesignReport report =
      design_pulse(problem, DesignInit::from_sequence(good));
  CHECK(report.final_cost() >= report.cost_history.front());
}

TEST_CASE("ensemble validation") {
  EnsembleSpec ens;
  CHECK_THROWS_AS(ens.validate(), std::invalid_argument);
  ens.f_samples = {0.0};
  ens.g_samples = {0.0, 0.1};
  ens.weights = {0.5};
  CHECK_THROWS_AS(ens.validate(), std::invalid_argument);
  ens.weights = {0.5, -0.1};
  CHECK_THROWS_AS(ens.validate(), std::invalid_argument);
  ens.weights = {2.0, 6.0};
  const std::vector<double> w = ens.normalized_weights();
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(w[1] == doctest::Approx(0.75));

  DesignProblem problem;
  problem.ensemble = ens;
  problem.n_steps = 0;
  CHECK_THROWS_AS(problem.validate(), std::invalid_argument);
}
