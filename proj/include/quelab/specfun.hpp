#pragma once

// Underflow-safe special functions at working precision.

#include "quelab/real.hpp"

namespace quelab::specfun {

/// sign * exp(logmag). Zero has sign 0 and an unspecified logmag.
class LogReal {
 public:
  LogReal() = default;
  static LogReal from_log(const Real& logmag, int sign = 1);
  static LogReal from_real(const Real& x);
  static LogReal from_integer(const Integer& z);

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  const Real& logmag() const { return logmag_; }

  /// Plain value; throws NumericError when it would leave the MPFR exponent range.
  Real to_real() const;
  /// Plain value, or 0 if it underflows; overflow still throws.
  Real to_real_or_zero() const;
  double to_double_log2() const;

  LogReal abs() const;
  LogReal operator-() const;
  LogReal pow(const Real& e) const;

  friend LogReal operator*(const LogReal& a, const LogReal& b);
  friend LogReal operator/(const LogReal& a, const LogReal& b);
  friend LogReal operator+(const LogReal& a, const LogReal& b);
  friend LogReal operator-(const LogReal& a, const LogReal& b);
  /// Compares values, not magnitudes.
  friend bool operator<(const LogReal& a, const LogReal& b);

 private:
  int sign_ = 0;
  Real logmag_;
};

/// Sums terms of either sign with positive and negative parts kept apart
/// until the end. Each part is held as mantissa * e^ref with ref tracking the
/// largest term seen, so one exponential per term suffices.
class SignSplitSum {
 public:
  void add(const LogReal& term);
  void add(const SignSplitSum& other);
  LogReal positive() const;
  LogReal negative() const;  // magnitude of the negative part
  LogReal total() const;
  /// log2((P + N) / |P - N|): bits lost to cancellation (inf if the total is 0).
  double cancellation_bits() const;
  long terms() const { return terms_; }

 private:
  struct Part {
    bool empty = true;
    Real ref;
    Real mant;
    void add(const Real& logmag);
    LogReal value() const;
  };
  Part pos_, neg_;
  long terms_ = 0;
};

/// ln(m!). Exact factorial for m <= 10^4, Stirling series with a bounded
/// remainder beyond.
LogReal log_factorial(long m);
Real log_factorial_exact(long m);
Real log_factorial_stirling(long m);

/// Regularized upper incomplete Gamma at integer shape,
/// Q(s, x) = e^{-x} sum_{m<s} x^m / m!, in log space.
LogReal log_reg_inc_gamma_q(long s, const Real& x);

/// Q(s, x) as a plain real. Values whose natural log is below
/// -4 ln2 * working_bits() come back as exact 0 with *underflow set.
Real reg_inc_gamma_q(long s, const Real& x, bool* underflow = nullptr);

/// Lower tail P(s, x) = 1 - Q(s, x); summed directly when x < s.
LogReal log_reg_inc_gamma_p(long s, const Real& x);

/// Q(s, x1) - Q(s, x2) for 0 <= x1 <= x2, without cancellation when both are near 1.
/// Passing x2 = +inf gives Q(s, x1).
LogReal log_gamma_q_difference(long s, const Real& x1, const Real& x2);

/// 1 - Q(k-1, k - k^{1/2+delta}).
Real gamma_lemma_gap(long k, const Real& delta);

/// Upper bound for sum_{n>k} n^K e^{-alpha n}:
/// max(a(k+1)/a(k), 1) * Gamma(K+1, alpha k) / alpha^{K+1}.
LogReal exp_poly_tail_bound(long K, const Real& alpha, long k);

/// Certified bound on sum_{n>N} lambda(n)^2 Q(k-1, 4 pi n T); needs 4 pi T (N+1) >= k-2.
LogReal vertical_tail_bound(int k, const Real& T, long N);

/// Smallest N (found by doubling then bisection, never below ceil(k / (2 pi T)))
/// whose vertical tail bound is at most e^{eps_log}.
long series_truncation_index(int k, const Real& T, const Real& eps_log, long cap = 10'000'000);

namespace oracle {
/// Lower regularized P(a, z) by a continued fraction (modified Lentz).
/// Independent of the finite-sum path; used only for cross-checks.
Real reg_inc_gamma_p_cf(const Real& a, const Real& z);
}  // namespace oracle

}  // namespace quelab::specfun
