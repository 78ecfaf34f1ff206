#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value or inconsistent combination of settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two records, maps or arrays whose shapes must agree do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (geometry, matrix, config or cache).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared in the fields during time stepping.
class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t step_index, const std::string& what)
      : Error("field divergence at step " + std::to_string(step_index) + ": " + what),
        step_index_(step_index) {}

  std::int64_t step_index() const noexcept { return step_index_; }

 private:
  std::int64_t step_index_;
};

/// A record with zero norm was passed to the fidelity: no light reached it.
class ZeroNormError : public Error {
 public:
  using Error::Error;
};

}  // namespace pforge
