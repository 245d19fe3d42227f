#pragma once

#include <stdexcept>
#include <string>

namespace netemb {

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Incompatible tensor/matrix shapes; message names both shapes.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Non-finite values, singular systems, diverging losses.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

// Bad user input: malformed files, invalid configs, out-of-range ids.
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

}  // namespace netemb
