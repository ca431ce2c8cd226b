#pragma once

#include <stdexcept>
#include <string>

namespace resistar {

/// Argument outside the domain an operation is defined on (point outside the
/// unit box, face dimension out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition of the caller was not met.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Floating-point degeneracy that prevents a geometric step from completing.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent persisted data (store files, configs, CSV).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid request from a command-line or API user (unknown format tag, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace resistar
