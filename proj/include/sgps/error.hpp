#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgps {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two signals (or a signal and an operator) disagree on shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a scalar argument was violated (sigma <= 0, n == 0, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration. `field` names the offending key ("sampler.alpha").
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An iterate became non-finite. Carries the sampling step and the stage
/// ("denoise", "guidance", "sure", ...) where it happened.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string stage, std::size_t step, const std::string& detail)
      : Error("diverged in " + stage + " at step " + std::to_string(step) + ": " + detail),
        stage_(std::move(stage)),
        step_(step) {}

  const std::string& stage() const noexcept { return stage_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::string stage_;
  std::size_t step_;
};

}  // namespace sgps
