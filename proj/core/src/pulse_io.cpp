#include "qpulse/pulse_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "qpulse/errors.hpp"

namespace qpulse {

namespace {

double canonical_phase(double phase) {
  double p = std::fmod(phase, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  if (p >= kTwoPi) p = 0.0;
  return p;
}

double parse_double(std::string_view token, int line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw PulseFileError("line " + std::to_string(line_no) + ": bad number '" +
                         std::string(token) + "'");
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_pulse_file(std::ostream& out, const PulseSequence& seq,
                      std::string_view comment) {
  seq.validate();
  out << "# qpulse pulse file: duration_us amplitude phase_rad\n";
  out << "rabi_nominal_rad_per_us=" << format_double(seq.rabi_nominal) << "\n";
  if (!comment.empty()) out << "comment=" << comment << "\n";
  for (const PulseStep& s : seq.steps)
    out << format_double(s.duration) << " " << format_double(s.amplitude) << " "
        << format_double(canonical_phase(s.phase)) << "\n";
}

void write_pulse_file(const std::filesystem::path& path, const PulseSequence& seq,
                      std::string_view comment) {
  std::ofstream out(path);
  if (!out) throw PulseFileError("cannot open '" + path.string() + "' for writing");
  write_pulse_file(out, seq, comment);
  if (!out) throw PulseFileError("write to '" + path.string() + "' failed");
}

PulseSequence read_pulse_file(std::istream& in) {
  PulseSequence seq;
  seq.rabi_nominal = 0.0;
  bool have_rabi = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (const auto eq = sv.find('='); eq != std::string_view::npos) {
      const std::string_view key = trim(sv.substr(0, eq));
      const std::string_view value = trim(sv.substr(eq + 1));
      if (key == "rabi_nominal_rad_per_us") {
        seq.rabi_nominal = parse_double(value, line_no);
        have_rabi = true;
      } else if (key != "comment") {
        throw PulseFileError("line " + std::to_string(line_no) + ": unknown header key '" +
                             std::string(key) + "'");
      }
      continue;
    }
    std::istringstream fields{std::string(sv)};
    std::string d, a, p, extra;
    fields >> d >> a >> p;
    if (!fields || (fields >> extra))
      throw PulseFileError("line " + std::to_string(line_no) +
                           ": expected 'duration_us amplitude phase_rad'");
    PulseStep step;
    step.duration = parse_double(d, line_no);
    step.amplitude = parse_double(a, line_no);
    step.phase = parse_double(p, line_no);
    seq.steps.push_back(step);
  }
  if (!have_rabi) throw PulseFileError("missing rabi_nominal_rad_per_us header");
  try {
    seq.validate();
  } catch (const std::invalid_argument& e) {
    throw PulseFileError(std::string("invalid pulse file: ") + e.what());
  }
  return seq;
}

PulseSequence read_pulse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PulseFileError("cannot open '" + path.string() + "' for reading");
  return read_pulse_file(in);
}

void write_grid_csv(std::ostream& out, const FidelityGrid& grid) {
  out << "f,g,F\n";
  for (std::size_t i = 0; i < grid.nf(); ++i)
    for (std::size_t j = 0; j < grid.ng(); ++j)
      out << format_double(grid.f_axis[i]) << "," << format_double(grid.g_axis[j]) << ","
          << format_double(grid.at(i, j)) << "\n";
}

void write_mask_csv(std::ostream& out, const ThresholdMask& mask) {
  out << "f,g,pass\n";
  for (std::size_t i = 0; i < mask.nf(); ++i)
    for (std::size_t j = 0; j < mask.ng(); ++j)
      out << format_double(mask.f_axis[i]) << "," << format_double(mask.g_axis[j]) << ","
          << (mask.at(i, j) ? 1 : 0) << "\n";
}

void write_fringe_csv(std::ostream& out, const FringeData& data) {
  out << "phase_rad,count_one,shots\n";
  for (std::size_t i = 0; i < data.phases.size(); ++i)
    out << format_double(data.phases[i]) << "," << data.counts_one[i] << ","
        << data.shots << "\n";
}

void write_fit_csv(std::ostream& out, const FitResult& fit) {
  out << "theta_m,phi_m,sigma_theta,sigma_phi\n";
  out << format_double(fit.theta_m) << "," << format_double(fit.phi_m) << ","
      << format_double(fit.sigma_theta) << "," << format_double(fit.sigma_phi) << "\n";
}

void write_cost_log_csv(std::ostream& out, std::span<const double> costs) {
  out << "iteration,cost\n";
  for (std::size_t i = 0; i < costs.size(); ++i)
    out << i << "," << format_double(costs[i]) << "\n";
}

}  // namespace qpulse
