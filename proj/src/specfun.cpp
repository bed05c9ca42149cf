#include "quelab/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <mpfr.h>

#include "quelab/errors.hpp"
#include "quelab/qseries.hpp"

namespace quelab::specfun {

namespace {

// Natural-log limits of finite MPFR values at the current exponent range.
Real log_overflow_limit() { return Real(mpfr_get_emax() - 2) * ln2(); }
Real log_underflow_limit() { return Real(mpfr_get_emin() + 2) * ln2(); }

// Terms this far below the running scale cannot change a working-precision result.
Real negligible_log_gap() { return -Real(working_bits() + 64) * ln2(); }

}  // namespace

LogReal LogReal::from_log(const Real& logmag, int sign) {
  LogReal r;
  if (sign == 0) return r;
  r.sign_ = sign > 0 ? 1 : -1;
  r.logmag_ = logmag;
  return r;
}

LogReal LogReal::from_real(const Real& x) {
  if (x == 0) return LogReal();
  return from_log(log(boost::multiprecision::abs(x)), x > 0 ? 1 : -1);
}

LogReal LogReal::from_integer(const Integer& z) {
  int s = sgn(z);
  if (s == 0) return LogReal();
  Integer m = z;
  if (s < 0) m = -m;
  return from_log(log(quelab::to_real(m)), s);
}

Real LogReal::to_real() const {
  if (sign_ == 0) return Real(0);
  if (logmag_ > log_overflow_limit()) throw NumericError("LogReal overflows the real range");
  if (logmag_ < log_underflow_limit()) throw NumericError("LogReal underflows the real range");
  Real v = exp(logmag_);
  return sign_ > 0 ? v : Real(-v);
}

Real LogReal::to_real_or_zero() const {
  if (sign_ == 0 || logmag_ < log_underflow_limit()) return Real(0);
  return to_real();
}

double LogReal::to_double_log2() const {
  if (sign_ == 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(logmag_ / ln2());
}

LogReal LogReal::abs() const {
  LogReal r = *this;
  if (r.sign_ != 0) r.sign_ = 1;
  return r;
}

LogReal LogReal::operator-() const {
  LogReal r = *this;
  r.sign_ = -r.sign_;
  return r;
}

LogReal LogReal::pow(const Real& e) const {
  if (sign_ < 0) throw DomainError("real power of a negative LogReal");
  if (sign_ == 0) {
    if (e > 0) return LogReal();
    throw DomainError("non-positive power of zero");
  }
  return from_log(logmag_ * e);
}

LogReal operator*(const LogReal& a, const LogReal& b) {
  if (a.sign_ == 0 || b.sign_ == 0) return LogReal();
  return LogReal::from_log(a.logmag_ + b.logmag_, a.sign_ * b.sign_);
}

LogReal operator/(const LogReal& a, const LogReal& b) {
  if (b.sign_ == 0) throw DomainError("LogReal division by zero");
  if (a.sign_ == 0) return LogReal();
  return LogReal::from_log(a.logmag_ - b.logmag_, a.sign_ * b.sign_);
}

LogReal operator+(const LogReal& a, const LogReal& b) {
  if (a.sign_ == 0) return b;
  if (b.sign_ == 0) return a;
  // Order the operands so the result does not depend on argument order.
  bool a_big = a.logmag_ > b.logmag_ || (a.logmag_ == b.logmag_ && a.sign_ >= b.sign_);
  const LogReal& big = a_big ? a : b;
  const LogReal& small = a_big ? b : a;
  Real d = small.logmag_ - big.logmag_;
  if (d < negligible_log_gap()) return big;
  if (big.sign_ == small.sign_) return LogReal::from_log(big.logmag_ + log1p(exp(d)), big.sign_);
  if (d == 0) return LogReal();
  return LogReal::from_log(big.logmag_ + log1p(-exp(d)), big.sign_);
}

LogReal operator-(const LogReal& a, const LogReal& b) { return a + (-b); }

bool operator<(const LogReal& a, const LogReal& b) {
  if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
  if (a.sign_ == 0) return false;
  return a.sign_ > 0 ? a.logmag_ < b.logmag_ : a.logmag_ > b.logmag_;
}

void SignSplitSum::Part::add(const Real& logmag) {
  if (empty) {
    empty = false;
    ref = logmag;
    mant = 1;
    return;
  }
  if (logmag > ref) {
    Real d = ref - logmag;
    mant = d < negligible_log_gap() ? Real(1) : Real(mant * exp(d) + 1);
    ref = logmag;
  } else {
    Real d = logmag - ref;
    if (d >= negligible_log_gap()) mant += exp(d);
  }
}

LogReal SignSplitSum::Part::value() const {
  if (empty) return LogReal();
  return LogReal::from_log(ref + log(mant));
}

void SignSplitSum::add(const LogReal& term) {
  ++terms_;
  if (term.sign() > 0) pos_.add(term.logmag());
  if (term.sign() < 0) neg_.add(term.logmag());
}

void SignSplitSum::add(const SignSplitSum& other) {
  if (!other.pos_.empty) add(other.positive());
  if (!other.neg_.empty) add(-other.negative());
  terms_ += other.terms_ - (other.pos_.empty ? 0 : 1) - (other.neg_.empty ? 0 : 1);
}

LogReal SignSplitSum::positive() const { return pos_.value(); }
LogReal SignSplitSum::negative() const { return neg_.value(); }
LogReal SignSplitSum::total() const { return positive() - negative(); }

double SignSplitSum::cancellation_bits() const {
  LogReal t = total();
  if (t.is_zero()) {
    return pos_.empty && neg_.empty ? 0.0 : std::numeric_limits<double>::infinity();
  }
  LogReal gross = positive() + negative();
  return (gross / t.abs()).to_double_log2();
}

Real log_factorial_exact(long m) {
  if (m < 0) throw DomainError("factorial of a negative integer");
  if (m <= 1) return Real(0);
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(m));
  return log(to_real(f));
}

Real log_factorial_stirling(long m) {
  if (m < 1) throw DomainError("Stirling series needs m >= 1");
  const int bits = working_bits();
  Real result;
  {
    WorkingPrecision wp(bits + 32);
    Real x(m);
    Real lx = log(x);
    Real v = (x + Real(0.5)) * lx - x + log(2 * pi()) / 2;
    Real eps = pow2(-(bits + 16)) * v;
    Real prev_mag = std::numeric_limits<double>::infinity();
    Real x2 = x * x;
    Real xpow = x;  // x^{2j-1}
    bool converged = false;
    for (int j = 1; j < 100000; ++j) {
      Real t = to_real(qseries::bernoulli(2 * j)) / (Real(2 * j) * (2 * j - 1) * xpow);
      Real mag = boost::multiprecision::abs(t);
      if (mag > prev_mag) break;
      v += t;
      // The remainder is bounded by the first omitted term; check it before stopping.
      Real next = boost::multiprecision::abs(to_real(qseries::bernoulli(2 * j + 2)) /
                                             (Real(2 * j + 2) * (2 * j + 1) * xpow * x2));
      if (next < eps) {
        converged = true;
        break;
      }
      prev_mag = mag;
      xpow *= x2;
    }
    if (!converged) throw NoConvergence("Stirling series cannot reach working precision at m = " + std::to_string(m));
    result = v;
  }
  return with_bits(result, bits);
}

LogReal log_factorial(long m) {
  if (m < 0) throw DomainError("factorial of a negative integer");
  if (m <= 1) return LogReal::from_log(Real(0));
  return LogReal::from_log(m <= 10000 ? log_factorial_exact(m) : log_factorial_stirling(m));
}

LogReal log_reg_inc_gamma_q(long s, const Real& x) {
  if (s < 1) throw DomainError("incomplete Gamma shape must be a positive integer");
  if (x < 0) throw DomainError("incomplete Gamma argument must be non-negative");
  if (x == 0) return LogReal::from_log(Real(0));
  const int bits = working_bits();
  Real out;
  {
    WorkingPrecision wp(bits + 32);
    Real xx = with_bits(x, bits + 32);
    Real lx = log(xx);
    long mstar = s - 1;
    if (xx < s - 1) mstar = static_cast<long>(floor(xx).convert_to<double>());
    mstar = std::min(std::max(mstar, 0L), s - 1);

    Real eps = pow2(-(bits + 16));
    constexpr int kBlock = 32;
    Real sum(1), block(0);
    int in_block = 0;
    auto flush = [&]() {
      sum += block;
      block = 0;
      in_block = 0;
    };

    // Downward from the largest term: t_{m-1} / t_m = m / x <= 1.
    Real p(1);
    for (long m = mstar; m >= 1; --m) {
      p *= Real(m) / xx;
      block += p;
      if (++in_block == kBlock) flush();
      Real rho = Real(m - 1) / xx;
      if (rho < 1 && p * rho / (1 - rho) < eps * (sum + block)) break;
    }
    flush();
    // Upward: t_{m+1} / t_m = x / (m+1) < 1 beyond the mode.
    p = 1;
    for (long m = mstar; m + 1 <= s - 1; ++m) {
      p *= xx / Real(m + 1);
      block += p;
      if (++in_block == kBlock) flush();
      Real rho = xx / Real(m + 2);
      if (rho < 1 && p * rho / (1 - rho) < eps * (sum + block)) break;
    }
    flush();
    Real lt = Real(mstar) * lx - log_factorial(mstar).logmag();
    if (mstar == 0) lt = 0;
    out = lt - xx + log(sum);
  }
  return LogReal::from_log(with_bits(out, bits));
}

Real reg_inc_gamma_q(long s, const Real& x, bool* underflow) {
  LogReal q = log_reg_inc_gamma_q(s, x);
  bool under = q.logmag() < -4 * Real(working_bits()) * ln2();
  if (underflow) *underflow = under;
  if (under) return Real(0);
  return q.to_real();
}

LogReal log_reg_inc_gamma_p(long s, const Real& x) {
  if (s < 1) throw DomainError("incomplete Gamma shape must be a positive integer");
  if (x < 0) throw DomainError("incomplete Gamma argument must be non-negative");
  if (x == 0) return LogReal();
  if (x >= s) return LogReal::from_log(Real(0)) - log_reg_inc_gamma_q(s, x);
  const int bits = working_bits();
  Real out;
  {
    WorkingPrecision wp(bits + 32);
    Real xx = with_bits(x, bits + 32);
    // e^{-x} sum_{m>=s} x^m/m!, ratios x/(m+1) < 1 and decreasing.
    Real eps = pow2(-(bits + 16));
    Real sum(1), p(1);
    for (long m = s;; ++m) {
      p *= xx / Real(m + 1);
      sum += p;
      Real rho = xx / Real(m + 2);
      if (p * rho / (1 - rho) < eps * sum) break;
    }
    out = Real(s) * log(xx) - log_factorial(s).logmag() - xx + log(sum);
  }
  return LogReal::from_log(with_bits(out, bits));
}

LogReal log_gamma_q_difference(long s, const Real& x1, const Real& x2) {
  if (x1 < 0 || x2 < x1) throw DomainError("need 0 <= x1 <= x2");
  if (isinf(x2)) return log_reg_inc_gamma_q(s, x1);
  if (x1 == x2) return LogReal();
  const LogReal one = LogReal::from_log(Real(0));
  if (x2 <= s - 1) return log_reg_inc_gamma_p(s, x2) - log_reg_inc_gamma_p(s, x1);
  if (x1 >= s - 1) return log_reg_inc_gamma_q(s, x1) - log_reg_inc_gamma_q(s, x2);
  return one - log_reg_inc_gamma_p(s, x1) - log_reg_inc_gamma_q(s, x2);
}

Real gamma_lemma_gap(long k, const Real& delta) {
  if (k < 4) throw DomainError("gamma lemma needs k >= 4");
  const int bits = working_bits();
  Real gap;
  {
    WorkingPrecision wp(bits + 64);
    Real kk(k);
    Real cut = pow(kk, Real(0.5) + with_bits(delta, bits + 64));
    if (cut >= kk) throw DomainError("k^(1/2+delta) must stay below k");
    gap = log_reg_inc_gamma_p(k - 1, kk - cut).to_real();
  }
  return with_bits(gap, bits);
}

LogReal exp_poly_tail_bound(long K, const Real& alpha, long k) {
  if (K < 0) throw DomainError("exponent K must be non-negative");
  if (!(alpha > 0)) throw DomainError("decay rate must be positive");
  if (k < 1) throw DomainError("tail start must be at least 1");
  Real kk(k);
  Real log_ratio = Real(K) * log((kk + 1) / kk) - alpha;
  if (log_ratio < 0) log_ratio = 0;
  Real l = log_ratio + log_factorial(K).logmag() + log_reg_inc_gamma_q(K + 1, alpha * kk).logmag() -
           Real(K + 1) * log(alpha);
  return LogReal::from_log(l);
}

LogReal vertical_tail_bound(int k, const Real& T, long N) {
  if (!(T > 0)) throw DomainError("T must be positive");
  Real alpha = 4 * pi() * T;
  if (alpha * Real(N + 1) < k - 2) throw DomainError("tail bound needs 4 pi T (N+1) >= k-2");
  // lambda^2 <= tau^2 <= 4n and Q(k-1, x) <= (k-1) x^{k-2} e^{-x} / (k-2)! for x >= k-2.
  Real l = log(Real(4) * (k - 1)) + Real(k - 2) * log(alpha) - log_factorial(k - 2).logmag();
  return LogReal::from_log(l) * exp_poly_tail_bound(k - 1, alpha, N);
}

long series_truncation_index(int k, const Real& T, const Real& eps_log, long cap) {
  if (!(T > 0)) throw DomainError("T must be positive");
  long n0 = static_cast<long>(ceil(Real(k) / (2 * pi() * T)).convert_to<double>());
  n0 = std::max(n0, 1L);
  auto ok = [&](long n) { return vertical_tail_bound(k, T, n).logmag() <= eps_log; };
  if (ok(n0)) return n0;
  long lo = n0, hi = n0;
  while (!ok(hi)) {
    lo = hi;
    if (hi > cap / 2) throw NoConvergence("truncation index exceeds cap " + std::to_string(cap));
    hi *= 2;
  }
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (ok(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

namespace oracle {

Real reg_inc_gamma_p_cf(const Real& a, const Real& z) {
  if (!(a > 0) || z < 0) throw DomainError("continued fraction needs a > 0, z >= 0");
  if (z == 0) return Real(0);
  const int bits = working_bits();
  Real result;
  {
    WorkingPrecision wp(bits + 64);
    Real aa = with_bits(a, bits + 64), zz = with_bits(z, bits + 64);
    Real tiny = pow2(-(4 * bits + 256));
    Real eps = pow2(-(bits + 32));
    // gamma(a,z) = z^a e^{-z} / (a + K_{n>=1} alpha_n / (a + n)),
    // alpha_{2j-1} = -(a+j-1) z, alpha_{2j} = j z.
    Real f = aa, c = aa, d = 0;
    bool converged = false;
    for (long n = 1; n < 10'000'000; ++n) {
      long j = (n + 1) / 2;
      Real alpha = n % 2 == 1 ? Real(-(aa + Real(j - 1)) * zz) : Real(Real(j) * zz);
      Real b = aa + Real(n);
      d = b + alpha * d;
      if (d == 0) d = tiny;
      c = b + alpha / c;
      if (c == 0) c = tiny;
      d = 1 / d;
      Real delta = c * d;
      f *= delta;
      if (boost::multiprecision::abs(delta - 1) < eps) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NoConvergence("incomplete Gamma continued fraction did not converge");
    result = exp(aa * log(zz) - zz - lgamma(aa)) / f;
  }
  return with_bits(result, bits);
}

}  // namespace oracle

}  // namespace quelab::specfun
