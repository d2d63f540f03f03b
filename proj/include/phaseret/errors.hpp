#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phaseret {

/// Base of every error raised by the library. The CLI maps all of them to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite entries, malformed dimensions.
class InputDomainError : public Error {
 public:
  using Error::Error;
};

/// Operation applied to matrices of different scalar fields, or to a field it does not support.
class FieldError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class EmptySpanError : public Error {
 public:
  using Error::Error;
};

class NoComplementError : public Error {
 public:
  using Error::Error;
};

class InvalidWitnessError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured cap.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, double requested, double cap)
      : Error(what + " (requested " + fmt(requested) + ", cap " + fmt(cap) + ")"),
        requested_(requested),
        cap_(cap) {}
  double requested() const { return requested_; }
  double cap() const { return cap_; }

 private:
  static std::string fmt(double v) {
    auto s = std::to_string(v);
    if (auto dot = s.find('.'); dot != std::string::npos) s.erase(dot);
    return s;
  }
  double requested_;
  double cap_;
};

/// A matrix offered as an orthogonal projection is not idempotent or not self-adjoint.
class ProjectorError : public Error {
 public:
  ProjectorError(std::size_t index, double residual, const std::string& detail)
      : Error("projection " + std::to_string(index + 1) + " is not an orthogonal projection: " +
              detail + " residual " + std::to_string(residual)),
        index_(index),
        residual_(residual) {}
  /// 0-based.
  std::size_t index() const { return index_; }
  double residual() const { return residual_; }

 private:
  std::size_t index_;
  double residual_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace phaseret
