#pragma once

#include <stdexcept>
#include <string>

namespace creve {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fewer data points than the operation needs (empty scan, < 3 targets, ...).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Target geometry does not constrain the solution: coplanar directions,
// rank-deficient or ill-conditioned normal matrix.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

// An argument violates the operation's contract (non-finite value, dt <= 0,
// ratio outside [0,1], ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Query time outside the covered interval of a sampled sequence.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// Iterative solver exceeded its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double kkt_residual)
      : Error(what), kkt_residual(kkt_residual) {}
  double kkt_residual;
};

// No matched samples between two timestamped sequences.
class InsufficientOverlapError : public Error {
 public:
  using Error::Error;
};

// File level problem: missing file, unwritable directory.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed content in a data file; carries the location.
class ParseError : public IoError {
 public:
  ParseError(const std::string& file, long line, const std::string& what)
      : IoError(file + ":" + std::to_string(line) + ": " + what),
        file(file),
        line(line) {}
  std::string file;
  long line;
};

// Bad configuration: unknown key, out-of-range value, parse failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace creve
