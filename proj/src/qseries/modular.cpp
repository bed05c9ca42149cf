#include <mutex>
#include <string>
#include <vector>

#include "quelab/errors.hpp"
#include "quelab/qseries.hpp"

namespace quelab::qseries {

Rational bernoulli(int n) {
  if (n < 0) throw DomainError("Bernoulli index must be non-negative");
  if (n == 1) return Rational(-1, 2);
  if (n > 1 && n % 2 == 1) return Rational(0);

  static std::mutex mu;
  static std::vector<Rational> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (static_cast<int>(cache.size()) <= n) {
    // Akiyama-Tanigawa, recomputed from scratch up to n.
    std::vector<Rational> a(static_cast<size_t>(n) + 1);
    cache.assign(static_cast<size_t>(n) + 1, Rational(0));
    for (int m = 0; m <= n; ++m) {
      a[m] = Rational(1, m + 1);
      for (int j = m; j >= 1; --j) {
        a[j - 1] = j * (a[j - 1] - a[j]);
        a[j - 1].canonicalize();
      }
      cache[m] = a[0];
    }
  }
  return cache[n];
}

std::vector<Integer> divisor_power_sums(int e, int N) {
  if (e < 0 || N < 0) throw DomainError("divisor sums need e >= 0 and N >= 0");
  std::vector<Integer> s(static_cast<size_t>(N) + 1);
  Integer de;
  for (int d = 1; d <= N; ++d) {
    mpz_ui_pow_ui(de.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(e));
    for (int m = d; m <= N; m += d) s[m] += de;
  }
  return s;
}

ScaledSeries eisenstein_series(int k, int N) {
  if (k < 4 || k % 2 != 0) throw DomainError("Eisenstein series need even weight k >= 4");
  if (N < 0) throw DomainError("series order must be non-negative");
  Rational c = Rational(-2 * k) / bernoulli(k);
  c.canonicalize();
  ScaledSeries e;
  e.denominator = c.get_den();
  e.numerator = PowerSeries(N);
  e.numerator[0] = c.get_den();
  auto sigma = divisor_power_sums(k - 1, N);
  for (int n = 1; n <= N; ++n) e.numerator[n] = c.get_num() * sigma[n];
  return e;
}

PowerSeries delta_series(int N) {
  if (N < 1) throw DomainError("Delta needs order >= 1");
  // eta^3 / q^(1/8) = sum_m (-1)^m (2m+1) q^(m(m+1)/2)
  PowerSeries eta3(N - 1);
  for (int m = 0;; ++m) {
    long e = static_cast<long>(m) * (m + 1) / 2;
    if (e > N - 1) break;
    eta3[static_cast<int>(e)] = (m % 2 == 0 ? 1 : -1) * (2 * m + 1);
  }
  PowerSeries e6 = eta3 * eta3;
  PowerSeries e12 = e6 * e6;
  PowerSeries e24 = e12 * e12;
  PowerSeries d(N);
  for (int n = 1; n <= N; ++n) d[n] = e24[n - 1];
  return d;
}

PowerSeries delta_from_eisenstein(int N) {
  PowerSeries e4 = eisenstein_series(4, N).numerator;
  PowerSeries e6 = eisenstein_series(6, N).numerator;
  PowerSeries diff = e4.pow(3) - e6 * e6;
  return diff.divided_exactly(Integer(1728));
}

int cusp_dim(int k) {
  if (k % 2 != 0) throw DomainError("weight must be even");
  if (k < 12) return 0;
  return k % 12 == 2 ? k / 12 - 1 : k / 12;
}

Integer IntMatrix::trace() const {
  Integer t;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  const int n = a.size();
  IntMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      if (a(i, l) == 0) continue;
      for (int j = 0; j < n; ++j) mpz_addmul(c(i, j).get_mpz_t(), a(i, l).get_mpz_t(), b(l, j).get_mpz_t());
    }
  return c;
}

VictorMillerBasis victor_miller_basis(int k, int N) {
  const int d = cusp_dim(k);
  if (d == 0) throw DimensionZero("S_" + std::to_string(k) + " is zero");
  if (N < 2 * d + 1) {
    throw InsufficientOrder("order " + std::to_string(N) + " below 2d+1 = " + std::to_string(2 * d + 1));
  }
  const int b = k % 4 == 0 ? 0 : 1;
  auto a_of = [&](int c) { return (k - 6 * b - 12 * c) / 4; };
  if (a_of(d) < 0) throw DomainError("no Miller monomial for this weight");

  PowerSeries e4 = eisenstein_series(4, N).numerator;
  PowerSeries e6 = eisenstein_series(6, N).numerator;
  PowerSeries delta = delta_series(N);

  // M_c = E6^b E4^(a_c) Delta^c, with a_{c-1} = a_c + 3.
  std::vector<PowerSeries> x(static_cast<size_t>(d) + 1);
  x[d] = e4.pow(static_cast<unsigned>(a_of(d)));
  if (b == 1) x[d] = x[d] * e6;
  if (d > 1) {
    PowerSeries e4cubed = e4.pow(3);
    for (int c = d - 1; c >= 1; --c) x[c] = x[c + 1] * e4cubed;
  }
  std::vector<PowerSeries> m(static_cast<size_t>(d) + 1);
  PowerSeries dpow = delta;
  for (int c = 1; c <= d; ++c) {
    m[c] = x[c] * dpow;
    if (c < d) dpow = dpow * delta;
  }

  // Unit upper-triangular in q^1..q^d; clear above the diagonal from the bottom up.
  for (int c = d; c >= 1; --c) {
    for (int j = c + 1; j <= d; ++j) {
      Integer f = m[c][j];
      if (f != 0) m[c] -= m[j] * f;
    }
  }

  VictorMillerBasis vm;
  vm.weight = k;
  vm.dim = d;
  vm.order = N;
  vm.basis.reserve(static_cast<size_t>(d));
  for (int c = 1; c <= d; ++c) vm.basis.push_back(std::move(m[c]));
  return vm;
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

HeckeMatrix hecke_matrix(int p, const VictorMillerBasis& basis) {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  const int d = basis.dim;
  if (basis.order < p * (d + 1)) {
    throw InsufficientOrder("T_" + std::to_string(p) + " needs order >= " + std::to_string(p * (d + 1)));
  }
  Integer pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(basis.weight - 1));
  HeckeMatrix h;
  h.prime = p;
  h.weight = basis.weight;
  h.entries = IntMatrix(d);
  for (int i = 0; i < d; ++i) {
    const PowerSeries& g = basis.basis[static_cast<size_t>(i)];
    for (int j = 1; j <= d; ++j) {
      Integer v = g[p * j];
      if (j % p == 0) v += pk * g[j / p];
      h.entries(j - 1, i) = v;
    }
  }
  return h;
}

std::vector<Integer> charpoly(const IntMatrix& a) {
  // Faddeev-LeVerrier; every division below is exact over the integers.
  const int n = a.size();
  std::vector<Integer> c(static_cast<size_t>(n) + 1);
  c[n] = 1;
  IntMatrix mk(n);
  for (int k = 1; k <= n; ++k) {
    for (int i = 0; i < n; ++i) mk(i, i) += c[n - k + 1];
    IntMatrix amk = a * mk;
    Integer t = amk.trace();
    mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(k));
    c[n - k] = -t;
    mk = std::move(amk);
  }
  return c;
}

}  // namespace quelab::qseries
