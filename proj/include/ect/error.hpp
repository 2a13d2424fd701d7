#pragma once

#include <stdexcept>
#include <string>

namespace ect {

// Bad caller input: sizes, ranges, malformed distributions.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Training could not start (e.g. no examples at all).
struct TrainingDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An exhaustive computation would exceed its declared size limit.
struct ResourceRefusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The simulation harness caught a component breaking its own contract,
// e.g. an adversary spending more than its declared budget.
struct HarnessFault : std::logic_error {
  using std::logic_error::logic_error;
};

// Malformed model or dataset file.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ect
