#include "qpulse/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qpulse/errors.hpp"
#include "qpulse/parallel.hpp"

namespace qpulse {

void TargetRotation::validate() const {
  if (!(theta >= 0.0) || theta > kPi + 1e-12)
    throw std::invalid_argument("target theta must lie in [0, pi]");
  if (!std::isfinite(phi)) throw std::invalid_argument("target phi must be finite");
}

void Preparation::validate() const {
  if (!(a0 >= 0.0) || !(a1 >= 0.0) || a0 > 1.0 || a1 > 1.0)
    throw std::invalid_argument("preparation populations must lie in [0, 1]");
  if (std::abs(a0 + a1 - 1.0) > 1e-12)
    throw std::invalid_argument("preparation populations must sum to 1");
}

QubitState prepared_state(const Preparation& prep) {
  prep.validate();
  if (prep.a1 == 0.0) return QubitState::ket0();
  return QubitState::mixed(prep.a0, {0.0, 0.0}, prep.a1);
}

TargetRotation ideal_target(const PulseSequence& seq) {
  const BlochAngles a = bloch_angles(propagate(seq, {}, QubitState::ket0()));
  return {a.theta, a.phi};
}

double state_fidelity(const TargetRotation& target, const QubitState& achieved) {
  target.validate();
  const Complex t0{std::cos(0.5 * target.theta), 0.0};
  const Complex t1 = std::polar(std::sin(0.5 * target.theta), target.phi);
  if (achieved.is_pure()) {
    const Complex overlap = std::conj(t0) * achieved.c0() + std::conj(t1) * achieved.c1();
    return std::clamp(std::norm(overlap), 0.0, 1.0);
  }
  const Complex f = std::conj(t0) * (achieved.rho(0, 0) * t0 + achieved.rho(0, 1) * t1) +
                    std::conj(t1) * (achieved.rho(1, 0) * t0 + achieved.rho(1, 1) * t1);
  return std::clamp(f.real(), 0.0, 1.0);
}

double angles_fidelity(const TargetRotation& target, const BlochAngles& measured) {
  return 0.5 * (1.0 + std::cos(target.theta) * std::cos(measured.theta) +
                std::sin(target.theta) * std::sin(measured.theta) *
                    std::cos(measured.phi - target.phi));
}

double transfer_contrast(double p_one, const Preparation& prep) {
  prep.validate();
  return p_one - prep.a1;
}

std::size_t ThresholdMask::count() const {
  std::size_t n = 0;
  for (std::uint8_t v : pass) n += v != 0;
  return n;
}

namespace {

void check_axis(std::span<const double> axis, const char* name) {
  if (axis.empty()) throw std::invalid_argument(std::string(name) + " axis must be non-empty");
  for (std::size_t i = 0; i + 1 < axis.size(); ++i)
    if (!(axis[i] < axis[i + 1]))
      throw std::invalid_argument(std::string(name) + " axis must be strictly ascending");
}

}  // namespace

FidelityGrid sweep_grid(const PulseSequence& seq, const TargetRotation& target,
                        const Preparation& prep, std::span<const double> f_axis,
                        std::span<const double> g_axis, GMode g_mode) {
  seq.validate();
  target.validate();
  check_axis(f_axis, "f");
  check_axis(g_axis, "g");
  const QubitState initial = prepared_state(prep);

  FidelityGrid grid;
  grid.f_axis.assign(f_axis.begin(), f_axis.end());
  grid.g_axis.assign(g_axis.begin(), g_axis.end());
  grid.values.resize(f_axis.size() * g_axis.size());
  const std::size_t ng = g_axis.size();
  parallel_for(grid.values.size(), 0, [&](std::size_t cell) {
    const ErrorParams err{grid.f_axis[cell / ng], grid.g_axis[cell % ng], g_mode};
    grid.values[cell] = state_fidelity(target, propagate(seq, err, initial));
  });
  grid.fm = state_fidelity(target, propagate(seq, {0.0, 0.0, g_mode}, initial));
  return grid;
}

ThresholdMask threshold_mask(const FidelityGrid& grid, double ratio) {
  if (grid.fm <= 0.0)
    throw ZeroReferenceError("threshold mask undefined for Fm = 0");
  ThresholdMask mask;
  mask.f_axis = grid.f_axis;
  mask.g_axis = grid.g_axis;
  mask.pass.resize(grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    mask.pass[i] = grid.values[i] / grid.fm > ratio ? 1 : 0;
  return mask;
}

namespace {

/// Cell index c with axis[c] <= x <= axis[c+1]; throws outside the box.
std::size_t locate(const std::vector<double>& axis, double x, const char* name) {
  if (x < axis.front() || x > axis.back())
    throw OutOfBoundsError(std::string(name) + " query outside grid bounding box");
  if (axis.size() == 1) return 0;
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  if (hi == axis.size()) --hi;       // x equals the last node
  if (hi == 0) ++hi;                 // x equals the first node
  return hi - 1;
}

}  // namespace

double interpolate(const FidelityGrid& grid, double f, double g) {
  const std::size_t i = locate(grid.f_axis, f, "f");
  const std::size_t j = locate(grid.g_axis, g, "g");
  if (grid.nf() == 1 && grid.ng() == 1) return grid.at(0, 0);

  const auto frac = [](const std::vector<double>& axis, std::size_t c, double x) {
    if (axis.size() == 1) return 0.0;
    return (x - axis[c]) / (axis[c + 1] - axis[c]);
  };
  const double tf = grid.nf() == 1 ? 0.0 : frac(grid.f_axis, i, f);
  const double tg = grid.ng() == 1 ? 0.0 : frac(grid.g_axis, j, g);
  const std::size_t i1 = grid.nf() == 1 ? i : i + 1;
  const std::size_t j1 = grid.ng() == 1 ? j : j + 1;
  return (1.0 - tf) * (1.0 - tg) * grid.at(i, j) + tf * (1.0 - tg) * grid.at(i1, j) +
         (1.0 - tf) * tg * grid.at(i, j1) + tf * tg * grid.at(i1, j1);
}

std::vector<double> default_f_axis() {
  std::vector<double> axis;
  for (int i = -4; i <= 4; ++i) axis.push_back(0.25 * i);
  return axis;
}

std::vector<double> default_g_axis() {
  std::vector<double> axis;
  for (int i = -4; i <= 4; ++i) axis.push_back(i / 10.0);
  return axis;
}

}  // namespace qpulse
