#pragma once

#include <stdexcept>
#include <string>

namespace twv {

// Malformed input: unknown generators, bad exponents, schema violations.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematical precondition failed or a computation could not be certified.
class MathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public MathError {
 public:
  using MathError::MathError;
};

class DegenerateDenominator : public MathError {
 public:
  using MathError::MathError;
};

class PoleError : public MathError {
 public:
  using MathError::MathError;
};

// A zero order at t = 1 contradicts the parity rule for the dimension.
class ParityError : public MathError {
 public:
  using MathError::MathError;
};

// Deflation residual fell in the ambiguous band; rerun with extended precision.
class PrecisionEscalation : public MathError {
 public:
  using MathError::MathError;
};

}  // namespace twv
