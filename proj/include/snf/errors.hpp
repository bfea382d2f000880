#pragma once

#include <stdexcept>
#include <string>

namespace snf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested order exceeds what is known, or the order cap.
class OrderError : public Error {
 public:
  using Error::Error;
};

// Non-divisible dividend, or a divisor that is not a unit.
class DivisionError : public Error {
 public:
  using Error::Error;
};

// Input outside the supported class (nilpotent linear part, k >= 2, ...).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; carries the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace snf
