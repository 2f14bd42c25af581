#pragma once

#include <stdexcept>
#include <string>

namespace cogman {

// Base for every recoverable failure raised by the library. Callers that only
// care about "something went wrong" catch this; tests match the subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state, parameter vector, or gradient became NaN/Inf.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class MissingDetection : public Error {
 public:
  MissingDetection(std::string which)
      : Error("missing detection: " + which), which_(std::move(which)) {}
  const std::string& which() const { return which_; }

 private:
  std::string which_;
};

class LowConfidence : public Error {
 public:
  using Error::Error;
};

class DegenerateBox : public Error {
 public:
  using Error::Error;
};

// Least-squares design matrix is rank deficient.
class DegenerateDesign : public Error {
 public:
  using Error::Error;
};

class MissingCalibration : public Error {
 public:
  using Error::Error;
};

class ZeroExplorationSpace : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingCheckpoint : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cogman
