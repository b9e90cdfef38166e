#pragma once

#include <stdexcept>
#include <string>

namespace zeno {

/// Raised for malformed or semantically invalid scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an integration or a numerical invariant check fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zeno
