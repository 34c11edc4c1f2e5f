#pragma once

#include <stdexcept>
#include <string>

namespace assembly {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateAxisError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class UnreachableError : public Error {
 public:
  using Error::Error;
};

class JointLimitError : public Error {
 public:
  using Error::Error;
};

class UnplannableError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

class UnknownEdgeError : public Error {
 public:
  using Error::Error;
};

class CollidingEndpointError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SpiralExhaustedError : public Error {
 public:
  using Error::Error;
};

}  // namespace assembly
