#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Base class for all library-specific failures. Input validation uses
// std::invalid_argument / std::domain_error directly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested truncation cannot represent the state within the target tail mass.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// Successive quadrature refinements failed to meet the configured tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Multi-start minimization failed to produce a usable minimum.
class OptimizerError : public Error {
 public:
  using Error::Error;
};

// Both arm norms vanished; the fringe visibility is 0/0.
class UndefinedVisibilityError : public Error {
 public:
  using Error::Error;
};

// Target state has |<-beta|n>| ~ 1, the arrival-time window formula degenerates.
class DegenerateTargetError : public Error {
 public:
  using Error::Error;
};

// Sum of modulation coefficients vanishes; the arrival window diverges.
class NongenericTargetError : public Error {
 public:
  using Error::Error;
};

// Modulation coefficients overflow or their normalization sum is not finite.
class DivergentCoefficientsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace optomech
