#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qpulse/errors.hpp"
#include "qpulse/fidelity.hpp"
#include "qpulse/pulses.hpp"
#include "qpulse/qubit.hpp"

using namespace qpulse;

TEST_CASE("state fidelity basics") {
  const TargetRotation target{0.5 * kPi, -0.5 * kPi};
  CHECK(state_fidelity(target, QubitState::from_angles(0.5 * kPi, -0.5 * kPi)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(state_fidelity({kPi, 0.0}, QubitState::ket0()) == doctest::Approx(0.0));
  CHECK(state_fidelity({0.0, 0.0}, QubitState::ket0()) == doctest::Approx(1.0));

  // perfect resonant pi on the impure preparation: quantum fidelity 0.9,
  // transfer contrast a0 - a1 = 0.8
  const QubitState rho = prepared_state({0.9, 0.1});
  const QubitState after =
      propagate(rectangular(kPi, 0.0, kRabiNominal), {}, rho);
  CHECK(state_fidelity({kPi, 0.0}, after) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(transfer_contrast(after.population_one(), {0.9, 0.1}) ==
        doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("pi-target fidelity reduces to sin^2(theta_m / 2)") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> theta(0.0, kPi);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const double th = theta(gen);
    const QubitState psi = QubitState::from_angles(th, phase(gen));
    const double expected = std::sin(0.5 * th) * std::sin(0.5 * th);
    CHECK(std::abs(state_fidelity({kPi, phase(gen)}, psi) - expected) < 1e-12);
  }
}

TEST_CASE("transfer contrast is capped by a0 - a1") {
  const Preparation prep{0.9, 0.1};
  const QubitState rho = prepared_state(prep);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double best = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    PulseSequence seq;
    seq.rabi_nominal = kRabiNominal;
    for (int k = 0; k < 4; ++k)
      seq.steps.push_back({u01(gen), kTwoPi * u01(gen), 150.0 * u01(gen)});
    const double contrast =
        transfer_contrast(propagate(seq, {}, rho).population_one(), prep);
    CHECK(contrast <= 0.8 + 1e-12);
    best = std::max(best, contrast);
  }
  // the pi pulse itself reaches the ceiling
  const double at_pi = transfer_contrast(
      propagate(rectangular(kPi, 0.0, kRabiNominal), {}, rho).population_one(), prep);
  CHECK(at_pi == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(best <= at_pi + 1e-12);
}

TEST_CASE("preparation validation") {
  CHECK_THROWS_AS(prepared_state({0.8, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(prepared_state({1.2, -0.2}), std::invalid_argument);
  CHECK(prepared_state({1.0, 0.0}).is_pure());
  CHECK(!prepared_state({0.9, 0.1}).is_pure());
}

TEST_CASE("sweep_grid singletons and values") {
  const PulseSequence rect_pi = rectangular(kPi, 0.0, kRabiNominal);
  const TargetRotation target{kPi, 0.0};
  const Preparation pure{1.0, 0.0};

  const std::vector<double> zero{0.0};
  const FidelityGrid unit = sweep_grid(rect_pi, target, pure, zero, zero);
  CHECK(unit.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(unit.fm == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> one{1.0};
  const FidelityGrid detuned = sweep_grid(rect_pi, target, pure, one, zero);
  CHECK(std::abs(detuned.at(0, 0) - 0.31656383551035389) < 1e-12);
  CHECK(detuned.fm == doctest::Approx(1.0).epsilon(1e-12));  // fm is the value at (0,0)

  const FidelityGrid grid = sweep_grid(rect_pi, target, pure, default_f_axis(),
                                       default_g_axis());
  CHECK(grid.nf() == 9);
  CHECK(grid.ng() == 9);
  for (std::size_t i = 0; i < grid.nf(); ++i)
    for (std::size_t j = 0; j < grid.ng(); ++j) {
      CHECK(grid.at(i, j) >= 0.0);
      CHECK(grid.at(i, j) <= 1.0);
      const ErrorParams err{grid.f_axis[i], grid.g_axis[j]};
      CHECK(grid.at(i, j) ==
            state_fidelity(target, propagate(rect_pi, err, QubitState::ket0())));
    }
}

TEST_CASE("rectangular grids are exactly symmetric in the detuning sign") {
  const PulseSequence rect_pi = rectangular(kPi, 0.0, kRabiNominal, 3);
  const TargetRotation target{kPi, 0.0};
  for (const Preparation& prep : {Preparation{1.0, 0.0}, Preparation{0.9, 0.1}}) {
    const FidelityGrid grid =
        sweep_grid(rect_pi, target, prep, default_f_axis(), default_g_axis());
    for (std::size_t i = 0; i < grid.nf(); ++i)
      for (std::size_t j = 0; j < grid.ng(); ++j)
        CHECK(grid.at(i, j) == grid.at(grid.nf() - 1 - i, j));  // bitwise equal
  }
}

TEST_CASE("threshold masks") {
  const PulseSequence rect_pi = rectangular(kPi, 0.0, kRabiNominal);
  const FidelityGrid grid = sweep_grid(rect_pi, {kPi, 0.0}, {1.0, 0.0},
                                       default_f_axis(), default_g_axis());

  const ThresholdMask all = threshold_mask(grid, 0.0);
  for (std::size_t i = 0; i < grid.nf(); ++i)
    for (std::size_t j = 0; j < grid.ng(); ++j)
      CHECK(all.at(i, j) == (grid.at(i, j) > 0.0));

  // monotone shrinkage of the pass set
  const double ratios[] = {0.2, 0.5, 0.8, 0.9, 0.96, 0.99};
  ThresholdMask prev = all;
  for (const double r : ratios) {
    const ThresholdMask mask = threshold_mask(grid, r);
    for (std::size_t k = 0; k < mask.pass.size(); ++k)
      CHECK(mask.pass[k] <= prev.pass[k]);
    prev = mask;
  }

  // just above 1: nothing exceeds Fm strictly
  const ThresholdMask top = threshold_mask(grid, 1.0 + 1e-12);
  CHECK(top.count() == 0);

  // Fm = 0: a 2pi rotation never reaches the pi target
  const FidelityGrid zero_ref = sweep_grid(rectangular(kTwoPi, 0.0, kRabiNominal),
                                           {kPi, 0.0}, {1.0, 0.0},
                                           std::vector<double>{0.0},
                                           std::vector<double>{0.0});
  CHECK_THROWS_AS(threshold_mask(zero_ref, 0.9), ZeroReferenceError);
}

TEST_CASE("CORPSE's 0.96 pass band along f strictly contains the rectangular one") {
  const std::vector<double> g0{0.0};
  const FidelityGrid rect = sweep_grid(rectangular(kPi, 0.0, kRabiNominal),
                                       {kPi, 0.0}, {1.0, 0.0}, default_f_axis(), g0);
  const FidelityGrid corpse = sweep_grid(corpse_pi(0.0, kRabiNominal), {kPi, 0.0},
                                         {1.0, 0.0}, default_f_axis(), g0);
  const ThresholdMask mr = threshold_mask(rect, 0.96);
  const ThresholdMask mc = threshold_mask(corpse, 0.96);
  for (std::size_t i = 0; i < mr.nf(); ++i)
    CHECK(mc.at(i, 0) >= mr.at(i, 0));
  CHECK(mc.count() > mr.count());
}

TEST_CASE("bilinear interpolation") {
  SUBCASE("hand-built cell") {
    FidelityGrid grid;
    grid.f_axis = {0.0, 1.0};
    grid.g_axis = {0.0, 1.0};
    grid.values = {0.0, 0.0, 1.0, 1.0};  // F(f,g) = f
    grid.fm = 1.0;
    CHECK(interpolate(grid, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(interpolate(grid, 0.0, 0.0) == 0.0);
    CHECK(interpolate(grid, 1.0, 1.0) == 1.0);
    CHECK(interpolate(grid, 0.25, 0.9) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(interpolate(grid, 1.5, 0.5), OutOfBoundsError);
    CHECK_THROWS_AS(interpolate(grid, 0.5, -0.1), OutOfBoundsError);
  }
  SUBCASE("nodes are exact on a swept grid") {
    const FidelityGrid grid = sweep_grid(rectangular(kPi, 0.0, kRabiNominal),
                                         {kPi, 0.0}, {1.0, 0.0}, default_f_axis(),
                                         default_g_axis());
    for (std::size_t i = 0; i < grid.nf(); ++i)
      for (std::size_t j = 0; j < grid.ng(); ++j)
        CHECK(interpolate(grid, grid.f_axis[i], grid.g_axis[j]) == grid.at(i, j));
  }
  SUBCASE("quarter-spacing query stays close to the closed form") {
    const FidelityGrid grid = sweep_grid(rectangular(kPi, 0.0, kRabiNominal, 2),
                                         {kPi, 0.0}, {1.0, 0.0}, default_f_axis(),
                                         std::vector<double>{0.0});
    const double approx = interpolate(grid, 0.125, 0.0);
    const double exact = test::rabi_p1_amplitude(kPi, 0.125, 0.0);
    CHECK(std::abs(approx - exact) < 0.02);
  }
  SUBCASE("single-point grid") {
    FidelityGrid grid;
    grid.f_axis = {0.5};
    grid.g_axis = {0.5};
    grid.values = {0.7};
    grid.fm = 0.7;
    CHECK(interpolate(grid, 0.5, 0.5) == 0.7);
    CHECK_THROWS_AS(interpolate(grid, 0.6, 0.5), OutOfBoundsError);
  }
}

TEST_CASE("axis validation") {
  const PulseSequence seq = rectangular(kPi, 0.0, kRabiNominal);
  const std::vector<double> empty;
  const std::vector<double> unsorted{0.5, 0.0};
  const std::vector<double> good{0.0};
  CHECK_THROWS_AS(sweep_grid(seq, {kPi, 0.0}, {1.0, 0.0}, empty, good),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_grid(seq, {kPi, 0.0}, {1.0, 0.0}, good, unsorted),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_grid(seq, {1.5 * kPi, 0.0}, {1.0, 0.0}, good, good),
                  std::invalid_argument);  // target theta beyond pi
}

TEST_CASE("angles_fidelity matches the overlap formula") {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> theta(0.0, kPi);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const TargetRotation target{theta(gen), phase(gen)};
    const double tm = theta(gen);
    const double pm = phase(gen);
    const double via_state = state_fidelity(target, QubitState::from_angles(tm, pm));
    CHECK(std::abs(angles_fidelity(target, {tm, pm}) - via_state) < 1e-12);
  }
}
