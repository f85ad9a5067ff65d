#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvxdef {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; `position()` is a 0-based byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Evaluation left the domain of a node function (log of a non-positive value, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// ‖∇r‖ fell below the singular-point threshold.
class VanishingGradientError : public Error {
 public:
  VanishingGradientError(const std::string& where, double norm)
      : Error(where + ": gradient vanished (norm " + std::to_string(norm) + ")"), norm_(norm) {}

  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

/// I + δH is (numerically) singular; carries its smallest singular value.
class SingularShiftError : public Error {
 public:
  explicit SingularShiftError(double smallest_singular_value)
      : Error("singular shift: smallest singular value of I + delta*H is " +
              std::to_string(smallest_singular_value)),
        smallest_singular_value_(smallest_singular_value) {}

  double smallest_singular_value() const noexcept { return smallest_singular_value_; }

 private:
  double smallest_singular_value_;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The distance critical point found by the foot-point solver is not a local minimum.
class SaddlePointError : public Error {
 public:
  using Error::Error;
};

/// The point lies farther from the boundary than the spec's collar radius.
class OutsideCollarError : public Error {
 public:
  using Error::Error;
};

class BoundaryNotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvxdef
