// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mgfmax {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class EngineMismatch : public Error {
 public:
  using Error::Error;
};

// Raised when an operation needs a level that the operand no longer has.
class LevelExhausted : public Error {
 public:
  LevelExhausted(const std::string &op, int level)
      : Error("level exhausted in " + op + " (operand level " + std::to_string(level) + ")"), op_(op) {}
  const std::string &operation() const noexcept { return op_; }

 private:
  std::string op_;
};

class IntervalError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ScaleTooLarge : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class NonGaussianFamily : public Error {
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

}  // namespace mgfmax
