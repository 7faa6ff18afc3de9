#pragma once

#include <stdexcept>
#include <string>

namespace hopf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments, frame mismatches, unknown shapes, bad config.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Rank-deficient Jacobian, singular metric, vanishing gradient.
class DegeneratePointError : public Error {
 public:
  using Error::Error;
};

class NumericalQualityError : public Error {
 public:
  using Error::Error;
};

/// An estimator that only makes sense for one parity of the ambient dimension.
class UnsupportedParityError : public Error {
 public:
  using Error::Error;
};

class NonRegularValueError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class MeshIngestError : public Error {
 public:
  using Error::Error;
};

}  // namespace hopf
