#pragma once

#include <stdexcept>
#include <string>

namespace mzi {

// Bad parameters raise std::invalid_argument. The types below cover the
// remaining failure classes so callers can tell them apart.

/// A numerical quantity could not be evaluated (singular matrix, NaN).
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

/// No closed form exists for the requested resource/loss combination.
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  explicit UnsupportedConfiguration(const std::string& what) : std::invalid_argument(what) {}
};

/// The signal slope vanishes at the requested working point, so error
/// propagation is undefined there.
class DegenerateWorkingPoint : public std::runtime_error {
 public:
  explicit DegenerateWorkingPoint(const std::string& what) : std::runtime_error(what) {}
};

/// Every probed point of an objective was degenerate.
class NoOptimum : public std::runtime_error {
 public:
  explicit NoOptimum(const std::string& what) : std::runtime_error(what) {}
};

/// The Fock truncation drops more probability than the oracle tolerates.
class CutoffTooSmall : public std::runtime_error {
 public:
  explicit CutoffTooSmall(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mzi
