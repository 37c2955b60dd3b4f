#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "qpulse/fidelity.hpp"
#include "qpulse/measurement.hpp"
#include "qpulse/qubit.hpp"

namespace qpulse {

/// Shortest exact decimal form of x, up to 17 significant digits;
/// locale-independent, round-trips to the same double.
std::string format_double(double x);

/// Pulse file: '#' comment lines, key=value header lines
/// (rabi_nominal_rad_per_us, optional comment), then one
/// "duration_us amplitude phase_rad" record per step. Phases are
/// canonicalized into [0, 2pi) on write; values round-trip exactly.
void write_pulse_file(std::ostream& out, const PulseSequence& seq,
                      std::string_view comment = {});
void write_pulse_file(const std::filesystem::path& path, const PulseSequence& seq,
                      std::string_view comment = {});

/// Throws PulseFileError on malformed input (message carries the line number).
PulseSequence read_pulse_file(std::istream& in);
PulseSequence read_pulse_file(const std::filesystem::path& path);

/// "f,g,F" rows, f-major order, matching FidelityGrid::values.
void write_grid_csv(std::ostream& out, const FidelityGrid& grid);

/// "f,g,pass" rows with pass in {0, 1}.
void write_mask_csv(std::ostream& out, const ThresholdMask& mask);

/// "phase_rad,count_one,shots".
void write_fringe_csv(std::ostream& out, const FringeData& data);

/// "theta_m,phi_m,sigma_theta,sigma_phi".
void write_fit_csv(std::ostream& out, const FitResult& fit);

/// "iteration,cost".
void write_cost_log_csv(std::ostream& out, std::span<const double> costs);

}  // namespace qpulse
