#pragma once

namespace qpulse::cli {

/// Entry point of the qpulse tool. Returns the process exit code:
/// 0 success, 1 invalid flags or I/O failure, 2 design ended with
/// NoImprovement.
int run_cli(int argc, const char* const* argv);

}  // namespace qpulse::cli
