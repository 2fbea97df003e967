#pragma once

#include <stdexcept>

namespace radiomap {

// Non-finite or otherwise malformed input values.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed configuration (bad field ranges, unknown keys, mismatched sizes).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A measurement arrived out of time order.
class OrderingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyDictionaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix shapes do not match.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Constraint set has no usable geometry (e.g. zero kernel matrix).
class DegenerateConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfAreaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radiomap
