#ifndef RBSEG_ERRORS_HPP
#define RBSEG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rbseg {

// Error categories map onto CLI exit codes: config -> 2, numeric -> 3, io -> 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rbseg

#endif  // RBSEG_ERRORS_HPP
