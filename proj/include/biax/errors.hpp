#pragma once

#include <stdexcept>
#include <string>

namespace biax {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A frame drifted too far from SO(3) for frame-based formulas to be meaningful.
class FrameDefect : public Error {
 public:
  using Error::Error;
};

/// reproject_so3 was handed a singular or reflection-like near-frame.
class DegenerateFrame : public Error {
 public:
  using Error::Error;
};

class InvalidCoefficients : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf in an assembled right-hand side or state.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// Requested time step violates the stability limit. Caller should halve dt.
class StepRejected : public Error {
 public:
  StepRejected(const std::string& what, double limit) : Error(what), limit_(limit) {}
  double limit() const { return limit_; }

 private:
  double limit_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace biax
