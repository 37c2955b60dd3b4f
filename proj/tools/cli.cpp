#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "angles.hpp"
#include "qpulse/designer.hpp"
#include "qpulse/errors.hpp"
#include "qpulse/fidelity.hpp"
#include "qpulse/measurement.hpp"
#include "qpulse/pulse_io.hpp"
#include "qpulse/pulses.hpp"

namespace qpulse::cli {

namespace {

/// "MIN:MAX:COUNT" -> COUNT equally spaced values.
std::vector<double> parse_range(const std::string& token, const std::string& flag) {
  const auto first = token.find(':');
  const auto second = first == std::string::npos ? first : token.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw CLI::ValidationError(flag, "expected MIN:MAX:COUNT, got '" + token + "'");
  const auto num = [&](const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw CLI::ValidationError(flag, "bad number '" + s + "'");
    return v;
  };
  const double lo = num(token.substr(0, first));
  const double hi = num(token.substr(first + 1, second - first - 1));
  long count = 0;
  {
    const std::string s = token.substr(second + 1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), count);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw CLI::ValidationError(flag, "bad COUNT '" + s + "'");
  }
  if (count < 1) throw CLI::ValidationError(flag, "COUNT must be >= 1");
  if (count > 1 && !(lo < hi)) throw CLI::ValidationError(flag, "MIN must be < MAX");
  std::vector<double> values;
  for (long i = 0; i < count; ++i)
    values.push_back(count == 1 ? lo
                                : lo + (hi - lo) * static_cast<double>(i) /
                                      static_cast<double>(count - 1));
  return values;
}

double parse_angle_flag(const std::string& token, const std::string& flag) {
  try {
    return parse_angle(token);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(flag, e.what());
  }
}

GMode parse_g_mode(const std::string& token, const std::string& flag) {
  if (token == "amp" || token == "amplitude") return GMode::AmplitudeScale;
  if (token == "dur" || token == "duration") return GMode::DurationScale;
  throw CLI::ValidationError(flag, "expected 'amp' or 'dur', got '" + token + "'");
}

/// Writes through fn to the given path, or to stdout when the path is empty
/// or "-".
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// Shared pulse-source flags of the grid and measure subcommands.
struct PulseSourceOptions {
  std::string builtin;
  std::string pulse_file;
  std::string theta = "pi";
  std::string phi = "0";
  std::string placement = "split";
  std::size_t rect_steps = 1;
  double rabi = kRabiNominal;

  void attach(CLI::App& cmd) {
    auto* b = cmd.add_option("--builtin", builtin,
                             "builtin pulse: rect, corpse, scrofulous, bb1")
                  ->check(CLI::IsMember({"rect", "corpse", "scrofulous", "bb1"}));
    auto* f = cmd.add_option("--pulse-file", pulse_file, "pulse file to load");
    b->excludes(f);
    cmd.add_option("--theta", theta, "target rotation angle (rect/bb1 builtins)");
    cmd.add_option("--phi", phi, "target rotation phase");
    cmd.add_option("--placement", placement, "bb1 placement: before, after, split")
        ->check(CLI::IsMember({"before", "after", "split"}));
    cmd.add_option("--steps", rect_steps, "number of steps for the rect builtin")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--rabi", rabi, "nominal Rabi frequency in rad/us (builtins)")
        ->check(CLI::PositiveNumber);
  }

  PulseSequence build() const {
    if (!pulse_file.empty()) return read_pulse_file(pulse_file);
    if (builtin.empty())
      throw CLI::ValidationError("--builtin",
                                 "either --builtin or --pulse-file is required");
    CompositeSpec spec;
    spec.target_theta = parse_angle_flag(theta, "--theta");
    spec.target_phi = parse_angle_flag(phi, "--phi");
    spec.rect_steps = rect_steps;
    if (builtin == "rect") spec.family = PulseFamily::Rectangular;
    if (builtin == "corpse") spec.family = PulseFamily::CorpsePi;
    if (builtin == "scrofulous") spec.family = PulseFamily::ScrofulousPi;
    if (builtin == "bb1") {
      spec.family = PulseFamily::BB1;
      spec.bb1_placement = placement == "before" ? Bb1Placement::WBefore
                           : placement == "after" ? Bb1Placement::WAfter
                                                  : Bb1Placement::Split;
    }
    try {
      return build_pulse(spec, rabi);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--builtin", e.what());
    }
  }
};

struct DesignOptions {
  std::string theta = "pi/2";
  std::string phi = "-pi/2";
  std::size_t steps = 200;
  double step_us = 0.5;
  double rabi = kRabiNominal;
  double max_amp = 1.0;
  double tol = 1e-8;
  int max_iters = 2000;
  std::string f_range = "-1:1:9";
  std::string g_range = "-0.4:0.4:5";
  std::string g_mode = "amp";
  std::string init = "random";
  std::string init_file;
  std::string out;
  std::string log;
  std::string param = "quadrature";
  std::uint64_t seed = 0;
};

void add_design(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "design", "design a robust pulse by ensemble gradient ascent");
  auto opts = std::make_shared<DesignOptions>();
  cmd->add_option("--theta", opts->theta, "target rotation angle")->capture_default_str();
  cmd->add_option("--phi", opts->phi, "target rotation phase")->capture_default_str();
  cmd->add_option("--steps", opts->steps, "number of pulse steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--step-us", opts->step_us, "step duration in us")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--rabi", opts->rabi, "nominal Rabi frequency in rad/us")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--f-range", opts->f_range, "detuning ensemble MIN:MAX:COUNT")
      ->capture_default_str();
  cmd->add_option("--g-range", opts->g_range, "area-error ensemble MIN:MAX:COUNT")
      ->capture_default_str();
  cmd->add_option("--g-mode", opts->g_mode, "apply g to: amp | dur")
      ->check(CLI::IsMember({"amp", "dur", "amplitude", "duration"}));
  cmd->add_option("--max-amp", opts->max_amp, "relative amplitude cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", opts->max_iters, "iteration cap")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--tol", opts->tol, "convergence tolerance on cost improvement")
      ->capture_default_str();
  cmd->add_option("--init", opts->init, "initial guess: random | rect")
      ->check(CLI::IsMember({"random", "rect"}));
  cmd->add_option("--init-file", opts->init_file,
                  "pulse file used as the initial guess");
  cmd->add_option("--seed", opts->seed, "seed for the random init")
      ->capture_default_str();
  cmd->add_option("--param", opts->param,
                  "optimizer variables: quadrature | amp-phase")
      ->check(CLI::IsMember({"quadrature", "amp-phase"}));
  cmd->add_option("--out", opts->out, "output pulse file (default stdout)");
  cmd->add_option("--log", opts->log, "iteration,cost log CSV");

  cmd->callback([opts] {
    DesignProblem problem;
    problem.target.theta = parse_angle_flag(opts->theta, "--theta");
    problem.target.phi = parse_angle_flag(opts->phi, "--phi");
    problem.n_steps = opts->steps;
    problem.step_duration = opts->step_us;
    problem.rabi_nominal = opts->rabi;
    problem.max_amplitude = opts->max_amp;
    problem.max_iterations = opts->max_iters;
    problem.convergence_tol = opts->tol;
    problem.ensemble.f_samples = parse_range(opts->f_range, "--f-range");
    problem.ensemble.g_samples = parse_range(opts->g_range, "--g-range");
    problem.ensemble.g_mode = parse_g_mode(opts->g_mode, "--g-mode");
    try {
      problem.validate();
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("design", e.what());
    }

    DesignInit init = DesignInit::random(opts->seed);
    if (!opts->init_file.empty())
      init = DesignInit::from_sequence(read_pulse_file(opts->init_file));
    else if (opts->init == "rect")
      init = DesignInit::rectangular();

    const ControlParameterization param =
        opts->param == "amp-phase" ? ControlParameterization::AmplitudePhase
                                   : ControlParameterization::Quadrature;
    const DesignReport report = design_pulse(problem, init, param);

    with_output(opts->out, [&](std::ostream& os) {
      write_pulse_file(os, report.sequence, "designed pulse");
    });
    if (!opts->log.empty())
      with_output(opts->log, [&](std::ostream& os) {
        write_cost_log_csv(os, report.cost_history);
      });
    std::cerr << "design: cost " << format_double(report.final_cost()) << " after "
              << report.cost_history.size() - 1 << " accepted iterations\n";
    if (report.status == DesignStatus::NoImprovement) {
      std::cerr << "design: no improving step found at iteration 0\n";
      throw CLI::RuntimeError(2);
    }
  });
}

struct GridOptions {
  std::string f_axis = "-1:1:9";
  std::string g_axis = "-0.4:0.4:9";
  std::string g_mode = "amp";
  std::string target_theta;
  std::string target_phi;
  double a0 = 1.0;
  double ratio = 0.9;
  std::string out;
  std::string mask_out;
};

void add_grid(CLI::App& app) {
  auto* cmd =
      app.add_subcommand("grid", "sweep fidelity over the (f, g) error plane");
  auto src = std::make_shared<PulseSourceOptions>();
  src->attach(*cmd);
  auto opts = std::make_shared<GridOptions>();
  cmd->add_option("--f-axis", opts->f_axis, "grid f axis MIN:MAX:COUNT")
      ->capture_default_str();
  cmd->add_option("--g-axis", opts->g_axis, "grid g axis MIN:MAX:COUNT")
      ->capture_default_str();
  cmd->add_option("--g-mode", opts->g_mode, "apply g to: amp | dur")
      ->check(CLI::IsMember({"amp", "dur", "amplitude", "duration"}));
  cmd->add_option("--target-theta", opts->target_theta,
                  "override target angle (default: the pulse's ideal action)");
  cmd->add_option("--target-phi", opts->target_phi, "override target phase");
  cmd->add_option("--a0", opts->a0, "preparation |0> population")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--ratio", opts->ratio, "mask threshold on F/Fm")
      ->capture_default_str();
  cmd->add_option("--out", opts->out, "grid CSV (default stdout)");
  cmd->add_option("--mask-out", opts->mask_out, "threshold mask CSV");

  cmd->callback([opts, src] {
    const PulseSequence seq = src->build();
    TargetRotation target = ideal_target(seq);
    if (!opts->target_theta.empty())
      target.theta = parse_angle_flag(opts->target_theta, "--target-theta");
    if (!opts->target_phi.empty())
      target.phi = parse_angle_flag(opts->target_phi, "--target-phi");
    const Preparation prep{opts->a0, 1.0 - opts->a0};
    const std::vector<double> fs = parse_range(opts->f_axis, "--f-axis");
    const std::vector<double> gs = parse_range(opts->g_axis, "--g-axis");
    const FidelityGrid grid =
        sweep_grid(seq, target, prep, fs, gs, parse_g_mode(opts->g_mode, "--g-mode"));
    with_output(opts->out, [&](std::ostream& os) { write_grid_csv(os, grid); });
    if (!opts->mask_out.empty()) {
      const ThresholdMask mask = threshold_mask(grid, opts->ratio);
      with_output(opts->mask_out, [&](std::ostream& os) { write_mask_csv(os, mask); });
    }
  });
}

struct MeasureOptions {
  std::string mode = "transfer";
  std::string g_mode = "amp";
  double f = 0.0;
  double g = 0.0;
  double a0 = 1.0;
  double flip = 0.0;
  long shots = 700;
  int phases = 20;
  std::uint64_t seed = 0;
  bool no_normalize = false;
  std::string out;
  std::string fit_out;
};

void add_measure(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "measure", "stochastic emulation of the transfer / Ramsey measurement");
  auto src = std::make_shared<PulseSourceOptions>();
  src->attach(*cmd);
  auto opts = std::make_shared<MeasureOptions>();
  cmd->add_option("--mode", opts->mode, "transfer | ramsey")
      ->check(CLI::IsMember({"transfer", "ramsey"}))
      ->capture_default_str();
  cmd->add_option("--f", opts->f, "scaled detuning")->capture_default_str();
  cmd->add_option("--g", opts->g, "area error")->capture_default_str();
  cmd->add_option("--g-mode", opts->g_mode, "apply g to: amp | dur")
      ->check(CLI::IsMember({"amp", "dur", "amplitude", "duration"}));
  cmd->add_option("--shots", opts->shots, "shots per point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--phases", opts->phases, "number of Ramsey phases")
      ->check(CLI::Range(3, 1 << 20))
      ->capture_default_str();
  cmd->add_option("--a0", opts->a0, "preparation |0> population")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--flip-prob", opts->flip, "symmetric detection flip probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", opts->seed, "rng seed")->capture_default_str();
  cmd->add_flag("--no-normalize", opts->no_normalize,
                "skip the preparation-monitor contrast normalization of the fit");
  cmd->add_option("--out", opts->out, "transfer/fringe CSV (default stdout)");
  cmd->add_option("--fit-out", opts->fit_out,
                  "fit CSV for ramsey mode (default stdout)");

  cmd->callback([opts, src] {
    const PulseSequence seq = src->build();
    ExperimentConfig cfg;
    cfg.shots_per_point = opts->shots;
    cfg.prep = Preparation{opts->a0, 1.0 - opts->a0};
    cfg.n_phases = opts->phases;
    cfg.rng_seed = opts->seed;
    cfg.detection_flip_prob = opts->flip;
    const ErrorParams errors{opts->f, opts->g, parse_g_mode(opts->g_mode, "--g-mode")};

    if (opts->mode == "transfer") {
      const TransferEstimate est = run_transfer_experiment(seq, errors, cfg);
      const TransferEstimate monitor = run_preparation_monitor(cfg);
      with_output(opts->out, [&](std::ostream& os) {
        os << "p_one,sigma,count,shots,a1_monitor,contrast\n";
        os << format_double(est.p_one) << "," << format_double(est.sigma) << ","
           << est.count << "," << est.shots << "," << format_double(monitor.p_one)
           << "," << format_double(est.p_one - monitor.p_one) << "\n";
      });
      return;
    }

    const FringeData fringe = run_ramsey_experiment(seq, errors, cfg);
    with_output(opts->out, [&](std::ostream& os) { write_fringe_csv(os, fringe); });
    double contrast = 1.0;
    if (!opts->no_normalize) {
      const TransferEstimate monitor = run_preparation_monitor(cfg);
      contrast = std::clamp(1.0 - 2.0 * monitor.p_one, 0.05, 1.0);
    }
    const FitResult fit = fit_fringe(fringe, contrast);
    with_output(opts->fit_out, [&](std::ostream& os) { write_fit_csv(os, fit); });
    if (fit.degenerate)
      std::cerr << "measure: fringe contrast consistent with zero; "
                   "phi_m is not identifiable\n";
  });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "qpulse: composite and optimal-control single-qubit pulses, fidelity "
      "grids, and measurement emulation.\n"
      "Set QPULSE_WORKERS to bound the number of sweep threads (results do "
      "not depend on it)."};
  app.require_subcommand(1);
  add_design(app);
  add_grid(app);
  add_measure(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace qpulse::cli
