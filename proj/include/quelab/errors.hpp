#pragma once

#include <stdexcept>
#include <string>

namespace quelab {

/// Base for every failure raised by the laboratory.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failures of the numerics themselves (precision, convergence, spectra).
/// The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Caller supplied arguments outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

#define QUELAB_DEFINE_ERROR(Name, Base) \
  class Name : public Base {            \
   public:                              \
    using Base::Base;                   \
  }

QUELAB_DEFINE_ERROR(InsufficientOrder, DomainError);
QUELAB_DEFINE_ERROR(DimensionZero, DomainError);
QUELAB_DEFINE_ERROR(DimensionTooSmall, DomainError);
QUELAB_DEFINE_ERROR(MissingPrime, DomainError);
QUELAB_DEFINE_ERROR(InsufficientCoeffs, DomainError);
QUELAB_DEFINE_ERROR(WeightMismatch, DomainError);
QUELAB_DEFINE_ERROR(AllZeroCoeffs, DomainError);
QUELAB_DEFINE_ERROR(InsufficientRange, DomainError);

QUELAB_DEFINE_ERROR(DegenerateSpectrum, NumericError);
QUELAB_DEFINE_ERROR(ComplexRoot, NumericError);
QUELAB_DEFINE_ERROR(NoConvergence, NumericError);
QUELAB_DEFINE_ERROR(QuadratureStall, NumericError);
QUELAB_DEFINE_ERROR(NegativeMass, NumericError);

/// A cache entry failed validation; callers recompute.
QUELAB_DEFINE_ERROR(CorruptEntry, Error);

#undef QUELAB_DEFINE_ERROR

}  // namespace quelab
