#pragma once

#include <stdexcept>
#include <string>

namespace shiftdiv {

/// A requested range or size exceeds a configured limit (block size, global
/// limit, summation cap, brute-force scale).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// An argument violates a mathematical precondition (non-squarefree d,
/// composite p, s outside the supported window, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical evaluation could not reach the requested number of digits.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, double achieved_digits)
      : std::runtime_error(what), achieved_digits_(achieved_digits) {}

  double achieved_digits() const noexcept { return achieved_digits_; }

 private:
  double achieved_digits_;
};

}  // namespace shiftdiv
