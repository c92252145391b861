#pragma once

#include <stdexcept>
#include <string>

namespace varinf {

// Invalid parameter values (out-of-range dimension, non-positive radius, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidKernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tangent requested at (or within 1e-12 of) the singular set.
class SingularPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampler exceeded its trial budget; usually a misdeclared theta_max.
class SamplerFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateGapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProblemTooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleTooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace varinf
