#pragma once

#include <stdexcept>
#include <string>

namespace wearsim {

/// Raised when an operation receives arguments outside its contract.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when packet bytes do not match the configured layout.
class FramingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

}  // namespace wearsim
