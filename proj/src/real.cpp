#include "quelab/real.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <mpfr.h>

namespace quelab {

namespace {

mpfr_ptr raw(Real& x) { return x.backend().data(); }
mpfr_srcptr raw(const Real& x) { return x.backend().data(); }

}  // namespace

unsigned digits10_for_bits(int bits) {
  if (bits < 2) throw std::invalid_argument("precision must be at least 2 bits");
  // Boost maps d decimal digits to d*1000/301 (+1 or +2) bits.
  unsigned d = static_cast<unsigned>(std::ceil(bits * 0.30103));
  while (boost::multiprecision::detail::digits10_2_2(d) < static_cast<unsigned>(bits)) ++d;
  return d;
}

int working_bits() {
  return static_cast<int>(boost::multiprecision::detail::digits10_2_2(Real::default_precision()));
}

int bits_of(const Real& x) { return static_cast<int>(mpfr_get_prec(raw(x))); }

WorkingPrecision::WorkingPrecision(int bits) : saved_digits10_(Real::default_precision()) {
  Real::default_precision(digits10_for_bits(bits));
}

WorkingPrecision::~WorkingPrecision() { Real::default_precision(saved_digits10_); }

Real pi() {
  Real r;
  mpfr_const_pi(raw(r), MPFR_RNDN);
  return r;
}

Real ln2() {
  Real r;
  mpfr_const_log2(raw(r), MPFR_RNDN);
  return r;
}

Real euler_zeta2() {
  Real p = pi();
  return p * p / 6;
}

Real to_real(const Integer& z) {
  Real r;
  mpfr_set_z(raw(r), z.get_mpz_t(), MPFR_RNDN);
  return r;
}

Real to_real(const Rational& q) {
  Real r;
  mpfr_set_q(raw(r), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

Real with_bits(const Real& x, int bits) {
  Real r;
  mpfr_set_prec(raw(r), bits);
  mpfr_set(raw(r), raw(x), MPFR_RNDN);
  return r;
}

Real pow2(long e) {
  Real r(1);
  mpfr_mul_2si(raw(r), raw(r), e, MPFR_RNDN);
  return r;
}

std::string to_decimal(const Real& x) {
  if (mpfr_zero_p(raw(x))) return "0";
  if (!mpfr_number_p(raw(x))) throw std::domain_error("cannot serialize a non-finite value");
  size_t ndigits = mpfr_get_str_ndigits(10, mpfr_get_prec(raw(x)));
  mpfr_exp_t exp10 = 0;
  char* digits = mpfr_get_str(nullptr, &exp10, 10, ndigits, raw(x), MPFR_RNDN);
  std::string m(digits);
  mpfr_free_str(digits);
  bool negative = !m.empty() && m[0] == '-';
  if (negative) m.erase(0, 1);
  // value = 0.<m> * 10^exp10 = <m0>.<rest> * 10^(exp10-1)
  std::string out = negative ? "-" : "";
  out += m.substr(0, 1);
  if (m.size() > 1) {
    out += ".";
    out += m.substr(1);
  }
  out += "e" + std::to_string(static_cast<long>(exp10) - 1);
  return out;
}

Real from_decimal(const std::string& s, int bits) {
  Real r;
  mpfr_set_prec(raw(r), bits);
  if (mpfr_set_str(raw(r), s.c_str(), 10, MPFR_RNDN) != 0) {
    throw std::invalid_argument("malformed decimal string: " + s);
  }
  return r;
}

std::string to_report_string(const Real& x, int significant_digits) {
  std::vector<char> buf(static_cast<size_t>(significant_digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", significant_digits - 1, raw(x));
  return std::string(buf.data());
}

double log2_abs(const Real& x) {
  if (mpfr_zero_p(raw(x))) return -std::numeric_limits<double>::infinity();
  long e = 0;
  double m = mpfr_get_d_2exp(&e, raw(x), MPFR_RNDN);
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

double log2_abs(const Integer& z) {
  if (z == 0) return -std::numeric_limits<double>::infinity();
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

}  // namespace quelab
