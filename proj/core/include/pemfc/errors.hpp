#pragma once

#include <stdexcept>

namespace pemfc {

// Error taxonomy, mapped to CLI exit codes: validation -> 2, I/O -> 3, numerical -> 4.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pemfc
