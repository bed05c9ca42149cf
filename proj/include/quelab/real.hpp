#pragma once

#include <string>

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

namespace quelab {

using Real = boost::multiprecision::mpfr_float;
using Integer = mpz_class;
using Rational = mpq_class;

/// Boost sizes mpfr_float in decimal digits; this returns the smallest digit
/// count whose mantissa holds at least `bits` bits.
unsigned digits10_for_bits(int bits);

/// Mantissa bits of newly created Real values in the current scope.
int working_bits();

/// Mantissa bits actually carried by `x`.
int bits_of(const Real& x);

/// RAII guard for the working precision of newly created Real values.
///
/// Boost 1.74 keeps the mpfr_float default precision in a process-wide
/// variable, so scopes must not be opened concurrently from several threads.
class WorkingPrecision {
 public:
  explicit WorkingPrecision(int bits);
  ~WorkingPrecision();
  WorkingPrecision(const WorkingPrecision&) = delete;
  WorkingPrecision& operator=(const WorkingPrecision&) = delete;

 private:
  unsigned saved_digits10_;
};

Real pi();
Real ln2();
Real euler_zeta2();  // pi^2 / 6

Real to_real(const Integer& z);
Real to_real(const Rational& q);
/// Round `x` to `bits` of mantissa.
Real with_bits(const Real& x, int bits);
/// 2^e, exact.
Real pow2(long e);

/// Shortest decimal string that reads back to exactly the same binary value
/// at the same precision.
std::string to_decimal(const Real& x);
/// Parses a decimal string produced by to_decimal at `bits` of precision.
Real from_decimal(const std::string& s, int bits);
/// Fixed-width scientific rendering used by reports.
std::string to_report_string(const Real& x, int significant_digits = 25);

/// log2 |x| as a double; -inf for zero.
double log2_abs(const Real& x);
double log2_abs(const Integer& z);

}  // namespace quelab
