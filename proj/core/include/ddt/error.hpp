#pragma once

#include <stdexcept>
#include <string>

namespace ddt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CSV, JSON documents, schemas).
class DataError : public Error {
 public:
  using Error::Error;
};

// A caller violated an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// The teacher could not be reached or answered outside its contract.
class TeacherError : public Error {
 public:
  using Error::Error;
};

// Raised when a split carries no information (constant response, zero gain,
// degenerate gain-ratio denominator).
class UninformativeSplit : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddt
