#pragma once

#include <stdexcept>
#include <string>

namespace pmelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands built on different grids were combined.
class GeometryMismatch : public Error {
 public:
  GeometryMismatch() : Error("fields belong to different geometries") {}
};

/// A time step was rejected (positivity loss or linear-solve failure).
class StepError : public Error {
 public:
  enum class Reason { positivity, no_convergence };

  StepError(Reason reason, const std::string& what) : Error(what), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

/// A check was asked for with too few trajectory samples.
class InsufficientSamples : public Error {
 public:
  InsufficientSamples(std::size_t needed, std::size_t got)
      : Error("need at least " + std::to_string(needed) + " trajectory samples, got " +
              std::to_string(got)) {}
};

/// Invalid experiment configuration; `key()` is the dotted path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace pmelab
