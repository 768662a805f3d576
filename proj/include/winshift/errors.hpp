#pragma once

#include <stdexcept>
#include <string>

namespace winshift {

// Bad input data or schema violation. The CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown (divergent chain, singular matrix, degenerate
// variance). The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace winshift
