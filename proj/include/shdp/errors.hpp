#pragma once

#include <stdexcept>
#include <string>

namespace shdp {

// Invalid caller-supplied parameter (non-positive concentration, bad shapes, ...).
struct InvalidParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside a supported range (e.g. Stirling table size).
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Matrix decomposition failure (non-SPD scale, singular posterior).
struct DecompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All categorical weights vanished.
struct DegenerateDistributionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation not available for the selected emission family / sampler mode.
struct UnsupportedOperationError : std::logic_error {
  using std::logic_error::logic_error;
};

// A bookkeeping invariant was violated; signals a bug, not bad input.
struct InternalConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

// Malformed input file. Carries a 1-based row number when known.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg, long row = -1)
      : std::runtime_error(row >= 0 ? msg + " (row " + std::to_string(row) + ")" : msg),
        row_(row) {}
  long row() const { return row_; }

 private:
  long row_;
};

}  // namespace shdp
