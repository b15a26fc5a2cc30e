#pragma once

#include <stdexcept>
#include <string>

namespace srl {

// Error taxonomy mirrored by the C API status codes and the CLI exit codes:
// argument misuse, bad data on disk, and numerical failure.

struct ArgumentError : std::invalid_argument {
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace srl
