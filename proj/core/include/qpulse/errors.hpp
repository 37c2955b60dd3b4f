#pragma once

#include <stdexcept>
#include <string>

namespace qpulse {

/// Bloch direction requested for a state whose Bloch vector is numerically zero.
class DegenerateStateError : public std::domain_error {
 public:
  explicit DegenerateStateError(const std::string& what) : std::domain_error(what) {}
};

/// Threshold mask requested against a zero reference fidelity.
class ZeroReferenceError : public std::domain_error {
 public:
  explicit ZeroReferenceError(const std::string& what) : std::domain_error(what) {}
};

/// Interpolation query outside the grid bounding box; no extrapolation.
class OutOfBoundsError : public std::out_of_range {
 public:
  explicit OutOfBoundsError(const std::string& what) : std::out_of_range(what) {}
};

/// Fringe fit failed to converge within the iteration bound.
class FitConvergenceError : public std::runtime_error {
 public:
  explicit FitConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed pulse file or unreadable stream.
class PulseFileError : public std::runtime_error {
 public:
  explicit PulseFileError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpulse
