#pragma once

#include <stdexcept>
#include <string>

namespace mracrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument value was violated.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be Hurwitz is not.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its step cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A computation produced NaN or Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A parameter combination leaves a construction undefined (e.g. a zero
/// companion coefficient whose sign selects a gain).
class DegenerateParameterError : public Error {
 public:
  using Error::Error;
};

/// A derived controller quantity failed its own post-check.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `offset()` is the byte position, when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed input whose contents do not satisfy the document schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A guarded simulation signal left its allowed bound.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& signal, double time, double value)
      : Error("divergence: " + signal + " = " + std::to_string(value) +
              " at t = " + std::to_string(time) + " s"),
        signal_(signal),
        time_(time) {}
  const std::string& signal() const { return signal_; }
  double time() const { return time_; }

 private:
  std::string signal_;
  double time_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mracrl
