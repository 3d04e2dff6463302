#pragma once

#include <stdexcept>
#include <string>

namespace dess {

// Every error raised by the library derives from dess::Error so callers can
// catch the family in one place (the CLI maps them to exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveDepth : public Error {
 public:
  explicit NonPositiveDepth(double z)
      : Error("non-positive depth: " + std::to_string(z)) {}
};

class OutOfBounds : public Error {
 public:
  OutOfBounds(long x, long y, long w, long h)
      : Error("pixel (" + std::to_string(x) + ", " + std::to_string(y) +
              ") outside " + std::to_string(w) + "x" + std::to_string(h) +
              " image") {}
};

class NoValidPixel : public Error {
 public:
  NoValidPixel() : Error("depth image has no valid pixel") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NonPositiveDuration : public Error {
 public:
  explicit NonPositiveDuration(double t)
      : Error("trajectory duration must be positive, got " + std::to_string(t)) {}
};

class OutOfDomain : public Error {
 public:
  OutOfDomain(double t, double duration)
      : Error("time " + std::to_string(t) + " outside [0, " +
              std::to_string(duration) + "]") {}
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class GenerationFailure : public Error {
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

}  // namespace dess
