#pragma once

#include <stdexcept>
#include <string>

namespace bai {

// Malformed config files / CLI input. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric solver failed to converge; message carries the residual. Exit code 3.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bai
