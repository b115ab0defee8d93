#ifndef BATTRAE_ERRORS_HPP
#define BATTRAE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace battrae {

// Malformed input files, bad corpus lines, inconsistent model files.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Dimension mismatches between operands.
struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite values produced during evaluation or optimization.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace battrae

#endif
