#pragma once

#include <stdexcept>
#include <string>

namespace rabi {

// Exit code 2: the request is malformed or outside an operation's domain.
// Exit code 3: the request is valid but a numerical target was not met.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

class DomainError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class IndexError : public DomainError {
 public:
  using DomainError::DomainError;
};

class WindowError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DependencyError : public DomainError {
 public:
  using DomainError::DomainError;
};

class AccuracyError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class TruncationError : public AccuracyError {
 public:
  using AccuracyError::AccuracyError;
};

class LabelingError : public AccuracyError {
 public:
  using AccuracyError::AccuracyError;
};

class ModelMismatchError : public AccuracyError {
 public:
  using AccuracyError::AccuracyError;
};

}  // namespace rabi
