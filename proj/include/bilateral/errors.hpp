#pragma once

#include <stdexcept>
#include <string>

namespace bilateral {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments outside an operation's mathematical domain (j = 0 for a
// threshold, non-positive prices, inverted intervals, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatches and malformed economies.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Non-finite values along a run; the message carries a state dump.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
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

}  // namespace bilateral
