#pragma once

#include <stdexcept>
#include <string>

namespace patchfuse {

// Base for every library error. Subclasses that indicate bad input (files,
// config, dimensions) map to CLI exit code 2; anything else maps to 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyLayout : public InputError {
 public:
  using InputError::InputError;
};

class TooManyInstances : public InputError {
 public:
  using InputError::InputError;
};

class NegativeCapacity : public Error {
 public:
  using Error::Error;
};

class BadIndex : public Error {
 public:
  using Error::Error;
};

class NonFiniteCoefficient : public Error {
 public:
  using Error::Error;
};

}  // namespace patchfuse
