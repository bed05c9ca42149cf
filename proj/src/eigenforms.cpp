#include "quelab/eigenforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <mpfr.h>

#include "quelab/errors.hpp"

namespace quelab::eigenforms {

namespace {

using Poly = std::vector<Rational>;  // low to high, no trailing zeros

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Poly derivative(const Poly& p) {
  Poly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

Poly remainder(Poly a, const Poly& b) {
  const int db = degree(b);
  while (degree(a) >= db && !a.empty()) {
    Rational f = a.back() / b.back();
    const int shift = degree(a) - db;
    for (int i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

Poly poly_gcd(Poly a, Poly b) {
  while (!b.empty()) {
    Poly r = remainder(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

int sign_at(const Poly& p, const Rational& x) {
  Rational v = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return sgn(v);
}

class SturmChain {
 public:
  explicit SturmChain(const Poly& p) {
    chain_.push_back(p);
    chain_.push_back(derivative(p));
    while (!chain_.back().empty()) {
      Poly r = remainder(chain_[chain_.size() - 2], chain_.back());
      for (auto& c : r) c = -c;
      if (r.empty()) break;
      chain_.push_back(std::move(r));
    }
    if (chain_.back().empty()) chain_.pop_back();
  }

  int variations(const Rational& x) const {
    int v = 0, last = 0;
    for (const auto& q : chain_) {
      int s = sign_at(q, x);
      if (s == 0) continue;
      if (last != 0 && s != last) ++v;
      last = s;
    }
    return v;
  }

  // dir = +1 for +infinity, -1 for -infinity.
  int variations_at_infinity(int dir) const {
    int v = 0, last = 0;
    for (const auto& q : chain_) {
      int s = sgn(q.back());
      if (dir < 0 && degree(q) % 2 == 1) s = -s;
      if (last != 0 && s != last) ++v;
      last = s;
    }
    return v;
  }

 private:
  std::vector<Poly> chain_;
};

// Rational roots of a monic integer polynomial are integers, so non-integer
// split points are never roots.
Rational split_point(const Rational& a, const Rational& b) {
  Rational s = (a + b) / 2;
  Rational step = (b - a) / 4;
  while (s.get_den() == 1) {
    s += step;
    step /= 2;
  }
  s.canonicalize();
  return s;
}

Real horner(const std::vector<Real>& c, const Real& x) {
  Real v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

Rational to_rational(const Real& x) {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), x.backend().data());
  return q;
}

Rational abs_max1(const Rational& a) {
  Rational r = abs(a);
  return r < 1 ? Rational(1) : r;
}

// Root inside the isolating interval (a, b], polished to `bits` relative bits.
Real refine_root(const Poly& p, Rational a, Rational b, int bits) {
  const int sa = sign_at(p, a);
  Rational tol = Rational(1);
  mpz_mul_2exp(tol.get_den_mpz_t(), tol.get_den_mpz_t(), 64);
  while (b - a > tol * abs_max1(abs(a) > abs(b) ? a : b)) {
    Rational s = split_point(a, b);
    if (sign_at(p, s) == sa) a = s;
    else b = s;
  }

  WorkingPrecision wp(bits + 32);
  std::vector<Real> c, dc;
  for (const auto& q : p) c.push_back(quelab::to_real(q));
  for (const auto& q : derivative(p)) dc.push_back(quelab::to_real(q));
  Real x = quelab::to_real(Rational((a + b) / 2));
  Real stop = pow2(-(bits + 8));
  for (int it = 0; it < 200; ++it) {
    Real dx = horner(c, x) / horner(dc, x);
    x -= dx;
    Real scale = boost::multiprecision::abs(x);
    if (scale < 1) scale = 1;
    if (boost::multiprecision::abs(dx) <= stop * scale) break;
  }

  // Exact certificate: a sign change across a bracket of relative width 2^{-bits}.
  Real scale = boost::multiprecision::abs(x);
  if (scale < 1) scale = 1;
  Real rad = pow2(-bits) * scale;
  Rational lo = to_rational(Real(x - rad)), hi = to_rational(Real(x + rad));
  if (lo < a) lo = a;
  if (hi > b) hi = b;
  int slo = sign_at(p, lo), shi = sign_at(p, hi);
  bool certified = lo < hi && (slo == 0 || shi == 0 || slo != shi);
  if (!certified) {
    // Newton left the bracket; finish by exact bisection.
    Rational width = Rational(1);
    mpz_mul_2exp(width.get_den_mpz_t(), width.get_den_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    while (b - a > width * abs_max1(abs(a) > abs(b) ? a : b)) {
      Rational s = split_point(a, b);
      if (sign_at(p, s) == sa) a = s;
      else b = s;
    }
    x = quelab::to_real(Rational((a + b) / 2));
  }
  return with_bits(x, bits);
}

// Null vector of the (numerically) singular matrix A by full-pivot elimination.
std::vector<Real> null_vector(std::vector<std::vector<Real>> a) {
  const int d = static_cast<int>(a.size());
  std::vector<int> col(d);
  for (int j = 0; j < d; ++j) col[j] = j;
  for (int s = 0; s < d - 1; ++s) {
    int pr = s, pc = s;
    Real best = -1;
    for (int i = s; i < d; ++i)
      for (int j = s; j < d; ++j) {
        Real v = boost::multiprecision::abs(a[i][col[j]]);
        if (v > best) {
          best = v;
          pr = i;
          pc = j;
        }
      }
    std::swap(a[s], a[pr]);
    std::swap(col[s], col[pc]);
    for (int i = s + 1; i < d; ++i) {
      Real f = a[i][col[s]] / a[s][col[s]];
      for (int j = s; j < d; ++j) a[i][col[j]] -= f * a[s][col[j]];
    }
  }
  std::vector<Real> x(d);
  x[col[d - 1]] = 1;
  for (int s = d - 2; s >= 0; --s) {
    Real acc = 0;
    for (int j = s + 1; j < d; ++j) acc += a[s][col[j]] * x[col[j]];
    x[col[s]] = -acc / a[s][col[s]];
  }
  return x;
}

// n^{(k-1)/2} for even k, as an exact integer power times sqrt(n).
Real half_weight_power(long n, int k) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>((k - 2) / 2));
  return quelab::to_real(p) * sqrt(Real(n));
}

}  // namespace

std::vector<Real> real_roots(const std::vector<Integer>& poly, int bits) {
  Poly p;
  for (const auto& c : poly) p.push_back(Rational(c));
  trim(p);
  const int deg = degree(p);
  if (deg < 1) return {};
  if (degree(poly_gcd(p, derivative(p))) > 0) throw DegenerateSpectrum("characteristic polynomial has a repeated root");

  SturmChain sturm(p);
  const int nreal = sturm.variations_at_infinity(-1) - sturm.variations_at_infinity(1);
  if (nreal < deg) {
    throw ComplexRoot(std::to_string(deg - nreal) + " non-real roots in a Hecke characteristic polynomial");
  }

  Rational bound = 0;
  for (int i = 0; i < deg; ++i) bound = std::max(bound, Rational(abs(p[i] / p[deg])));
  bound += 1;

  std::vector<std::pair<Rational, Rational>> intervals;
  std::vector<std::tuple<Rational, Rational, int, int>> stack;
  stack.emplace_back(-bound, bound, sturm.variations(-bound), sturm.variations(bound));
  while (!stack.empty()) {
    auto [a, b, va, vb] = stack.back();
    stack.pop_back();
    int count = va - vb;
    if (count == 0) continue;
    if (count == 1) {
      intervals.emplace_back(a, b);
      continue;
    }
    Rational s = split_point(a, b);
    int vs = sturm.variations(s);
    // Push the upper half first so the lower half is processed first.
    stack.emplace_back(s, b, vs, vb);
    stack.emplace_back(a, s, va, vs);
  }

  std::vector<Real> roots;
  for (const auto& [a, b] : intervals) roots.push_back(refine_root(p, a, b, bits));
  return roots;
}

Eigenform form_from_coordinates(const qseries::VictorMillerBasis& basis, const std::vector<Real>& coords,
                                int ncoeffs, int precision_bits) {
  if (static_cast<int>(coords.size()) != basis.dim) throw DomainError("coordinate count differs from dim S_k");
  if (ncoeffs > basis.order) throw InsufficientCoeffs("basis order below requested coefficient count");
  if (coords[0] == 0) throw DomainError("a(1) = 0 cannot be normalized");
  const int k = basis.weight;
  std::vector<Real> c(coords.size());
  for (size_t j = 0; j < coords.size(); ++j) c[j] = coords[j] / coords[0];

  Eigenform f;
  f.weight = k;
  f.ncoeffs = ncoeffs;
  f.precision_bits = precision_bits;
  f.lambda.assign(static_cast<size_t>(ncoeffs) + 1, with_bits(Real(0), precision_bits));
  Real a2;
  for (int n = 1; n <= ncoeffs; ++n) {
    Real a = 0;
    for (int j = 0; j < basis.dim; ++j) {
      const Integer& g = basis.basis[static_cast<size_t>(j)][n];
      if (g != 0) a += c[j] * quelab::to_real(g);
    }
    if (n == 1) a = 1;
    if (n == 2) a2 = a;
    f.lambda[static_cast<size_t>(n)] = with_bits(Real(a / half_weight_power(n, k)), precision_bits);
  }
  f.t2_eigenvalue = with_bits(a2, precision_bits);
  return f;
}

EigenBasis eigen_decompose(int k, int ncoeffs, int precision_bits) {
  if (precision_bits < 128) throw DomainError("precision_bits must be at least 128");
  if (ncoeffs < 2) throw DomainError("need at least two coefficients");
  const int d = qseries::cusp_dim(k);
  if (d == 0) throw DimensionZero("S_" + std::to_string(k) + " is zero");
  const int order = std::max({ncoeffs, 2 * (d + 1), 2 * d + 1});
  auto vm = qseries::victor_miller_basis(k, order);
  auto t2 = qseries::hecke_matrix(2, vm).entries;

  EigenBasis out;
  out.weight = k;
  out.t2_charpoly = qseries::charpoly(t2);

  double mat_log2 = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) mat_log2 = std::max(mat_log2, log2_abs(t2(i, j)));

  int w = precision_bits + 64;
  for (int attempt = 0;; ++attempt) {
    WorkingPrecision wp(w);
    std::vector<Real> roots = real_roots(out.t2_charpoly, w);
    double gap_log2 = 0;
    for (int i = 1; i < d; ++i) {
      Real gap = roots[i] - roots[i - 1];
      if (gap < pow2(-precision_bits / 2)) throw DegenerateSpectrum("T_2 eigenvalues closer than 2^{-prec/2}");
      gap_log2 = i == 1 ? log2_abs(gap) : std::min(gap_log2, log2_abs(gap));
    }
    double cond_log2 = d > 1 ? std::max(0.0, mat_log2 + std::log2(static_cast<double>(d)) - gap_log2) : 0.0;

    std::vector<Eigenform> forms;
    double loss = 0;
    for (int i = 0; i < d; ++i) {
      std::vector<std::vector<Real>> a(d, std::vector<Real>(d));
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a[r][c] = quelab::to_real(t2(r, c)) - (r == c ? roots[i] : Real(0));
      std::vector<Real> v = null_vector(std::move(a));
      for (int j = d - 1; j >= 0; --j) v[j] /= v[0];

      double cmax = 0;
      for (const auto& x : v) cmax = std::max(cmax, log2_abs(x));
      for (int n = 1; n <= ncoeffs; ++n) {
        double gsum = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < d; ++j) {
          double g = log2_abs(vm.basis[static_cast<size_t>(j)][n]);
          if (std::isfinite(g)) gsum = std::max(gsum, g) + std::log2(1.0 + std::exp2(-std::fabs(gsum - g)));
        }
        if (!std::isfinite(gsum)) continue;
        double l = cmax + gsum - 0.5 * (k - 1) * std::log2(static_cast<double>(n)) + cond_log2;
        loss = std::max(loss, l);
      }

      Eigenform f = form_from_coordinates(vm, v, ncoeffs, precision_bits);
      f.index = i + 1;
      f.t2_eigenvalue = with_bits(roots[i], precision_bits);
      forms.push_back(std::move(f));
    }

    int needed = precision_bits + static_cast<int>(std::ceil(loss)) + 32;
    if (needed <= w) {
      out.forms = std::move(forms);
      out.working_bits = w;
      return out;
    }
    if (attempt >= 4 || needed > (1 << 18)) throw NoConvergence("eigenvector precision requirement keeps growing");
    w = needed + 64;
  }
}

Real lambda_extend_by_hecke(const Eigenform& form, long n) {
  if (n < 1) throw DomainError("n must be positive");
  WorkingPrecision wp(form.precision_bits + 32);
  Real result = 1;
  long m = n;
  for (long p = 2; p <= m; ++p) {
    if (p * p > m) p = m;
    if (m % p != 0) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (p > form.ncoeffs) throw MissingPrime("lambda(" + std::to_string(p) + ") not available");
    const Real& lp = form(p);
    Real prev = 1, cur = lp;
    for (int r = 1; r < e; ++r) {
      Real next = lp * cur - prev;
      prev = cur;
      cur = next;
    }
    result *= cur;
  }
  return with_bits(result, form.precision_bits);
}

long divisor_count(long n) {
  if (n < 1) throw DomainError("n must be positive");
  long count = 1;
  for (long p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    count *= e + 1;
  }
  if (n > 1) count *= 2;
  return count;
}

DeligneReport deligne_check(const Eigenform& form, long N, double epsilon) {
  if (N > form.ncoeffs) throw InsufficientCoeffs("form has fewer coefficients than requested");
  WorkingPrecision wp(form.precision_bits);
  DeligneReport r;
  r.max_ratio = 0;
  r.max_slack = 0;
  for (long n = 1; n <= N; ++n) {
    Real a = boost::multiprecision::abs(form(n));
    Real ratio = a / divisor_count(n);
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.argmax = n;
    }
    Real slack = a * pow(Real(n), Real(-epsilon));
    if (slack > r.max_slack) r.max_slack = slack;
  }
  r.pass = r.max_ratio <= 1 + pow2(-form.precision_bits / 2);
  return r;
}

}  // namespace quelab::eigenforms
