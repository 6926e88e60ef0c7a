#pragma once

#include <stdexcept>
#include <string>

namespace vcplab {

// Numerical tolerances shared by every module.
struct Tolerances {
  static constexpr double hermitian = 1e-12;
  static constexpr double virtual_hermitian = 1e-10;
  static constexpr double trace = 1e-12;
  static constexpr double psd = 1e-10;
  static constexpr double kraus = 1e-10;
  static constexpr double unitary = 1e-12;
  static constexpr double probability_sum = 1e-12;
  static constexpr double entropy_clamp = 1e-14;
  static constexpr double imaginary_part = 1e-10;
  static constexpr double degenerate_denominator = 1e-13;
  static constexpr double knill_laflamme = 1e-10;
  static constexpr double involution = 1e-12;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidChannel : public Error {
 public:
  using Error::Error;
};

class DegenerateEstimator : public Error {
 public:
  using Error::Error;
};

class UnknownSyndrome : public Error {
 public:
  using Error::Error;
};

}  // namespace vcplab
