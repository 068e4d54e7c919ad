#pragma once

#include <stdexcept>
#include <string>

namespace osr {

// Malformed or invariant-violating input data (bad files, inconsistent
// arguments referring to data contents). The CLI maps this to exit code 2;
// logic errors and exhausted resources stay on the std::exception path
// (exit code 3).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

}  // namespace osr
