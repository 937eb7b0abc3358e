#pragma once

#include <stdexcept>
#include <string>

namespace profilereg {

// Malformed or inconsistent input: corrupt records, unknown ids, shape
// mismatches in serialized artifacts. The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: non-finite loss, gradient check above tolerance.
// The CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace profilereg
