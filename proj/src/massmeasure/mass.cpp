#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "quelab/errors.hpp"
#include "quelab/massmeasure.hpp"

namespace quelab::massmeasure {

namespace {

using specfun::SignSplitSum;

Real infinity() { return Real(std::numeric_limits<double>::infinity()); }

void require_coeffs(const Eigenform& f, long n) {
  if (n > f.ncoeffs) {
    throw InsufficientCoeffs("form k=" + std::to_string(f.weight) + " #" + std::to_string(f.index) + " needs " +
                             std::to_string(n) + " coefficients, has " + std::to_string(f.ncoeffs));
  }
}

struct SignedLog {
  int sign = 0;
  Real log;
};

SignedLog signed_log(const Real& x) {
  if (x == 0) return {};
  return {x > 0 ? 1 : -1, log(boost::multiprecision::abs(x))};
}

// y-integral factors Q(k-1, 2 pi s t1) - Q(k-1, 2 pi s t2), by s = n + m, computed on demand.
class YFactors {
 public:
  YFactors(int k, const Rectangle& r) : k_(k), t1_(r.t1), t2_(r.t2) {}
  const LogReal& at(long s) {
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
    Real x1 = 2 * pi() * Real(s) * t1_;
    Real x2 = t2_ ? Real(2 * pi() * Real(s) * *t2_) : infinity();
    return cache_.emplace(s, specfun::log_gamma_q_difference(k_ - 1, x1, x2)).first->second;
  }

 private:
  int k_;
  Real t1_;
  std::optional<Real> t2_;
  std::map<long, LogReal> cache_;
};

// Dropped pairs with max(n, m) > N, using |lambda(n) lambda(m)| <= tau(n) tau(m) <= 2(n+m),
// |X| <= 1, G <= 1 and the incomplete-Gamma majorant; needs 2 pi t1 (N+2) >= k-2.
LogReal pair_tail_bound(int k, const Real& t1, long N) {
  Real alpha = 2 * pi() * t1;
  Real l = log(Real(2) * (k - 1)) + Real(k - 2) * log(alpha) - specfun::log_factorial(k - 2).logmag();
  return LogReal::from_log(l) * specfun::exp_poly_tail_bound(k, alpha, N + 1);
}

struct CrossCore {
  SignSplitSum re, im;
  long N = 0;
  long band = 0;
  LogReal remainder;  // in the same (scaled) units as re / im
};

// Scaled numerator sum_{n,m} lambda1(n) lambda2(m) (X + iY)_{n-m} G_{nm} dQ_{n+m};
// dividing by N_s gives mu.
CrossCore cross_core(const Eigenform& f1, const Eigenform& f2, const Rectangle& R, bool want_imag) {
  R.validate();
  if (f1.weight != f2.weight) throw WeightMismatch("cross mass needs equal weights");
  const int k = f1.weight;
  const int bits = working_bits();
  YFactors dq(k, R);
  const Real width = R.b - R.a;

  // Truncation N: the diagonal sum sets the scale the dropped pairs must stay below.
  long N = std::max<long>(static_cast<long>(std::ceil(k / (M_PI * R.t1.convert_to<double>()))), 2);
  LogReal diag;
  for (;;) {
    require_coeffs(f1, N);
    require_coeffs(f2, N);
    SignSplitSum d1, d2;
    for (long n = 1; n <= N; ++n) {
      const LogReal& q = dq.at(2 * n);
      d1.add(LogReal::from_real(Real(f1(n) * f1(n))) * q);
      d2.add(LogReal::from_real(Real(f2(n) * f2(n))) * q);
    }
    diag = LogReal::from_log((d1.total().logmag() + d2.total().logmag()) / 2) * LogReal::from_real(width);
    LogReal tail = pair_tail_bound(k, R.t1, N);
    if (tail.logmag() <= diag.logmag() - Real(bits + 16) * ln2()) break;
    if (N > (1L << 24)) throw NoConvergence("rectangle truncation did not converge");
    N *= 2;
  }

  // Band limit from a tau-majorant of the pairs with |n - m| > L.
  std::vector<double> log_tau(static_cast<size_t>(N) + 1);
  for (long n = 1; n <= N; ++n) log_tau[n] = std::log(static_cast<double>(eigenforms::divisor_count(n)));
  std::vector<double> log_dq(static_cast<size_t>(2 * N) + 1, -std::numeric_limits<double>::infinity());
  for (long s = 2; s <= 2 * N; ++s) {
    const LogReal& q = dq.at(s);
    if (!q.is_zero()) log_dq[s] = q.logmag().convert_to<double>();
  }
  const double target = diag.logmag().convert_to<double>() - (bits + 16) * std::log(2.0);
  auto band_bound = [&](long L) {
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    for (long n = 1; n <= N; ++n)
      for (long m = 1; m <= N; ++m) {
        long l = std::labs(n - m);
        if (l <= L) continue;
        double s = static_cast<double>(n + m);
        double g = (k - 1) / 2.0 * std::log1p(-(static_cast<double>(l) * l) / (s * s));
        double v = log_tau[n] + log_tau[m] + g + log_dq[n + m] - std::log(M_PI * l);
        logs.push_back(v);
        mx = std::max(mx, v);
      }
    if (logs.empty()) return -std::numeric_limits<double>::infinity();
    double acc = 0;
    for (double v : logs) acc += std::exp(v - mx);
    return mx + std::log(acc) + std::log(2.0);  // factor 2 covers double rounding
  };
  long L = std::max<long>(static_cast<long>(std::ceil(std::log(static_cast<double>(k)))), 1);
  double band_log = band_bound(L);
  while (band_log > target && L < N - 1) {
    L = std::min(2 * L, N - 1);
    band_log = band_bound(L);
  }
  if (L >= N - 1) band_log = -std::numeric_limits<double>::infinity();

  CrossCore core;
  core.N = N;
  core.band = L;
  core.remainder = pair_tail_bound(k, R.t1, N);
  if (std::isfinite(band_log)) core.remainder = core.remainder + LogReal::from_log(Real(band_log));

  // X_l and Y_l: real and imaginary parts of the x-integral of e^{2 pi i l x}.
  std::vector<LogReal> xl(static_cast<size_t>(2 * L) + 1), yl(static_cast<size_t>(2 * L) + 1);
  for (long l = -L; l <= L; ++l) {
    if (l == 0) {
      xl[L] = LogReal::from_real(width);
      continue;
    }
    Real w = 2 * pi() * l;
    xl[l + L] = LogReal::from_real(Real((sin(w * R.b) - sin(w * R.a)) / w));
    if (want_imag) yl[l + L] = LogReal::from_real(Real(-(cos(w * R.b) - cos(w * R.a)) / w));
  }
  std::vector<SignedLog> l1(static_cast<size_t>(N) + 1), l2(static_cast<size_t>(N) + 1);
  std::vector<Real> logn(static_cast<size_t>(N) + 1);
  for (long n = 1; n <= N; ++n) {
    l1[n] = signed_log(f1(n));
    l2[n] = signed_log(f2(n));
    logn[n] = log(Real(n));
  }
  const Real half = Real(k - 1) / 2;
  const Real log4 = log(Real(4));
  for (long n = 1; n <= N; ++n) {
    if (l1[n].sign == 0) continue;
    for (long m = std::max(1L, n - L); m <= std::min(N, n + L); ++m) {
      if (l2[m].sign == 0) continue;
      const LogReal& q = dq.at(n + m);
      if (q.is_zero()) continue;
      Real g = half * (log4 + logn[n] + logn[m] - 2 * log(Real(n + m)));
      LogReal base = LogReal::from_log(l1[n].log + l2[m].log + g, l1[n].sign * l2[m].sign) * q;
      core.re.add(base * xl[n - m + L]);
      if (want_imag) core.im.add(base * yl[n - m + L]);
    }
  }
  return core;
}

long vertical_n(const Eigenform& form, const Real& T) {
  long n = vertical_coefficients(form.weight, T);
  require_coeffs(form, n);
  return n;
}

}  // namespace

void Rectangle::validate() const {
  if (!(a < b)) throw DomainError("rectangle needs a < b");
  if (b - a > 1) throw DomainError("rectangle wider than one period");
  if (!(t1 > 0)) throw DomainError("rectangle needs t1 > 0");
  if (t2 && !(*t2 > t1)) throw DomainError("rectangle needs t2 > t1");
}

long vertical_coefficients(int k, const Real& T) {
  Real first = specfun::log_reg_inc_gamma_q(k - 1, 4 * pi() * T).logmag();
  return specfun::series_truncation_index(k, T, first - Real(working_bits() + 16) * ln2());
}

VerticalResult vertical_mass(const Eigenform& form, const Real& T, const MassProfile& profile) {
  if (!(T > 0)) throw DomainError("T must be positive");
  const int k = form.weight;
  const long N = vertical_n(form, T);
  SignSplitSum sum;
  for (long n = 1; n <= N; ++n) {
    if (form(n) == 0) continue;
    sum.add(LogReal::from_real(Real(form(n) * form(n))) * specfun::log_reg_inc_gamma_q(k - 1, 4 * pi() * T * n));
  }
  VerticalResult r;
  r.truncation = N;
  LogReal s = sum.total();
  LogReal reduced = LogReal::from_real(Real(2 * pi() * pi() / (Real(k - 1) * profile.sym2_l))) * s;
  // (1/||f||^2)(4 pi)^{1-k} sum lambda^2 (k-2)! Q
  LogReal raw = s * specfun::log_factorial(k - 2) /
                (profile.norm_sq * LogReal::from_log(Real(k - 1) * log(4 * pi())));
  r.log_value = reduced;
  r.value = reduced.to_real_or_zero();
  r.raw_value = raw.to_real_or_zero();
  r.tail_bound = specfun::vertical_tail_bound(k, T, N) / LogReal::from_real(profile.scaled_norm);
  return r;
}

RectResult rect_mass(const Eigenform& form, const Rectangle& R, const MassProfile& profile) {
  CrossCore core = cross_core(form, form, R, false);
  RectResult r;
  LogReal ns = LogReal::from_real(profile.scaled_norm);
  LogReal total = core.re.total();
  r.cancellation_bits = core.re.cancellation_bits();
  if (total.sign() < 0 || r.cancellation_bits > working_bits() - 64) {
    throw NegativeMass("rectangle mass lost its precision to cancellation (" + std::to_string(r.cancellation_bits) +
                       " bits)");
  }
  r.log_value = total / ns;
  r.value = r.log_value.to_real_or_zero();
  r.truncation = core.N;
  r.band = core.band;
  r.remainder_bound = core.remainder / ns;
  return r;
}

SiegelResult siegel_mass(const Eigenform& form, const SiegelDomain& S, const MassProfile& profile) {
  if (S.a < Real(-0.5) || S.b > Real(0.5)) throw DomainError("Siegel domain needs -1/2 <= a < b <= 1/2");
  SiegelResult r;
  r.mass = rect_mass(form, S.rect(), profile);
  Real x = 2 * pi() * S.T;
  r.log_bound = -x - log(x);
  const int k = form.weight;
  r.in_hypothesis = S.T >= 4 * Real(k) * log(Real(k));
  return r;
}

CrossResult cross_mass(const Eigenform& f1, const MassProfile& p1, const Eigenform& f2, const MassProfile& p2,
                       const Rectangle& R) {
  CrossCore core = cross_core(f1, f2, R, true);
  CrossResult r;
  LogReal denom = LogReal::from_log((log(p1.scaled_norm) + log(p2.scaled_norm)) / 2);
  LogReal re = core.re.total() / denom, im = core.im.total() / denom;
  r.re = re.to_real_or_zero();
  r.im = im.to_real_or_zero();
  r.approx = {r.re.convert_to<double>(), r.im.convert_to<double>()};
  LogReal unscale = LogReal::from_log(-log_scale(f1.weight));
  r.value_re = core.re.total() * unscale;
  r.value_im = core.im.total() * unscale;
  r.truncation = core.N;
  r.band = core.band;
  return r;
}

Real admissible_mass(const std::vector<std::complex<double>>& alpha, const EigenBasis& basis,
                     const std::vector<MassProfile>& profiles, const Rectangle& R) {
  const size_t d = basis.forms.size();
  if (alpha.size() != d || profiles.size() != d) throw DomainError("need one coefficient and profile per eigenform");
  bool any = false;
  for (auto a : alpha) any = any || a != std::complex<double>(0, 0);
  if (!any) throw AllZeroCoeffs("all admissible coefficients are zero");

  // sum_{i,l} alpha_i conj(alpha_l) K_il with K_li = conj(K_il).
  SignSplitSum num_re, num_im, den;
  for (size_t i = 0; i < d; ++i) {
    Real ar(alpha[i].real()), ai(alpha[i].imag());
    den.add(LogReal::from_real(Real(ar * ar + ai * ai)) * LogReal::from_real(profiles[i].scaled_norm));
    for (size_t l = i; l < d; ++l) {
      if (alpha[i] == 0.0 || alpha[l] == 0.0) continue;
      CrossCore core = cross_core(basis.forms[i], basis.forms[l], R, i != l);
      Real kr = core.re.total().to_real_or_zero();
      Real ki = i == l ? Real(0) : core.im.total().to_real_or_zero();
      Real br(alpha[l].real()), bi(-alpha[l].imag());  // conj(alpha_l)
      Real cr = ar * br - ai * bi, ci = ar * bi + ai * br;
      // c K + conj(c K) for the (l, i) partner.
      Real pr = cr * kr - ci * ki, pi_ = cr * ki + ci * kr;
      if (i == l) {
        num_re.add(LogReal::from_real(pr));
        num_im.add(LogReal::from_real(pi_));
      } else {
        num_re.add(LogReal::from_real(Real(2 * pr)));
      }
    }
  }
  LogReal dn = den.total();
  Real imag = (num_im.total() / dn).to_real_or_zero();
  if (boost::multiprecision::abs(imag) > pow2(-90)) throw NumericError("admissible mass has a non-real residue");
  return (num_re.total() / dn).to_real_or_zero();
}

MainErrorSplit main_error_split(const Eigenform& form, const Real& T, const Real& delta,
                                const MassProfile& profile) {
  if (!(T > 0)) throw DomainError("T must be positive");
  if (!(delta > 0) || !(delta < Real(0.5))) throw DomainError("delta must lie in (0, 1/2)");
  const int k = form.weight;
  const int bits = working_bits();
  MainErrorSplit r;
  Real kk(k);
  r.cut = static_cast<long>(floor((kk + pow(kk, Real(0.5) + delta)) / (4 * pi() * T)).convert_to<double>());

  const long nI = vertical_n(form, T);
  // The error part is summed to its own relative precision.
  Real first_e = specfun::log_reg_inc_gamma_q(k - 1, 4 * pi() * T * (r.cut + 1)).logmag();
  long nE = std::max(specfun::series_truncation_index(k, T, first_e - Real(bits / 2 + 16) * ln2()), r.cut + 1);
  require_coeffs(form, nE);

  SignSplitSum m, e, all;
  const long top = std::max(nI, nE);
  for (long n = 1; n <= top; ++n) {
    if (form(n) == 0) continue;
    LogReal t = LogReal::from_real(Real(form(n) * form(n))) * specfun::log_reg_inc_gamma_q(k - 1, 4 * pi() * T * n);
    if (n <= r.cut) m.add(t);
    else if (n <= nE) e.add(t);
    if (n <= nI) all.add(t);
  }
  LogReal ns = LogReal::from_real(profile.scaled_norm);
  r.main = (m.total() / ns).to_real_or_zero();
  r.error = (e.total() / ns).to_real_or_zero();
  r.total = (all.total() / ns).to_real_or_zero();
  // tau(n)^2 Q(k-1, 4 pi n T) at n = cut + 1, lemma bound beyond.
  const long n1 = r.cut + 1;
  LogReal d1 = LogReal::from_real(Real(eigenforms::divisor_count(n1) * eigenforms::divisor_count(n1)));
  r.error_certificate =
      (d1 * specfun::log_reg_inc_gamma_q(k - 1, 4 * pi() * T * n1) + specfun::vertical_tail_bound(k, T, n1)) / ns;
  return r;
}

}  // namespace quelab::massmeasure
