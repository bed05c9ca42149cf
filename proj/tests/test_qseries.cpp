#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "quelab/errors.hpp"
#include "quelab/qseries.hpp"

using namespace quelab;
using namespace quelab::qseries;

namespace {

// q * prod_{n<=N} (1 - q^n)^24, one binomial factor at a time.
PowerSeries delta_by_brute_force(int N) {
  std::vector<Integer> p(static_cast<size_t>(N) + 1);
  p[0] = 1;
  for (int n = 1; n <= N; ++n)
    for (int rep = 0; rep < 24; ++rep)
      for (int i = N; i >= n; --i) p[i] -= p[i - n];
  PowerSeries d(N);
  for (int i = 1; i <= N; ++i) d[i] = p[i - 1];
  return d;
}

PowerSeries random_series(std::mt19937_64& rng, int N, int bits) {
  PowerSeries s(N);
  for (int i = 0; i <= N; ++i) {
    Integer v = 0;
    for (int b = 0; b < bits; b += 32) v = (v << 32) + Integer(static_cast<unsigned long>(rng() & 0xffffffffu));
    if (rng() % 2) v = -v;
    if (rng() % 7 == 0) v = 0;
    s[i] = v;
  }
  return s;
}

}  // namespace

TEST_CASE("ramanujan tau first values") {
  PowerSeries d = delta_series(7);
  const long tau[] = {0, 1, -24, 252, -1472, 4830, -6048, -16744};
  for (int n = 0; n <= 7; ++n) CHECK(d[n] == tau[n]);
}

TEST_CASE("delta: triple product, brute force and Eisenstein agree") {
  const int N = 150;
  PowerSeries d = delta_series(N);
  CHECK(d == delta_by_brute_force(N));
  CHECK(d == delta_from_eisenstein(N));
}

TEST_CASE("tau is multiplicative and satisfies the Hecke recursion") {
  PowerSeries d = delta_series(200);
  CHECK(d[6] == d[2] * d[3]);
  CHECK(d[35] == d[5] * d[7]);
  Integer p11;
  mpz_ui_pow_ui(p11.get_mpz_t(), 2, 11);
  CHECK(d[4] == d[2] * d[2] - p11);
  mpz_ui_pow_ui(p11.get_mpz_t(), 3, 11);
  CHECK(d[27] == d[3] * d[9] - p11 * d[3]);
}

TEST_CASE("Eisenstein series low coefficients") {
  auto e4 = eisenstein_series(4, 3);
  CHECK(e4.denominator == 1);
  CHECK(e4.numerator == PowerSeries({1, 240, 2160, 6720}));
  auto e6 = eisenstein_series(6, 2);
  CHECK(e6.numerator == PowerSeries({1, -504, -16632}));
  auto e12 = eisenstein_series(12, 1);
  CHECK(e12.denominator == 691);
  CHECK(e12.numerator[1] == 65520);
  CHECK(eisenstein_series(4, 0).numerator.order() == 0);
  CHECK_THROWS_AS(eisenstein_series(5, 10), DomainError);
  CHECK_THROWS_AS(eisenstein_series(2, 10), DomainError);
}

TEST_CASE("E4^2 = E8 and E4 E6 = E10") {
  const int N = 80;
  auto e4 = eisenstein_series(4, N).numerator;
  auto e6 = eisenstein_series(6, N).numerator;
  CHECK(e4 * e4 == eisenstein_series(8, N).numerator);
  CHECK(e4 * e6 == eisenstein_series(10, N).numerator);
}

TEST_CASE("Bernoulli numbers") {
  CHECK(bernoulli(0) == 1);
  CHECK(bernoulli(1) == Rational(-1, 2));
  CHECK(bernoulli(2) == Rational(1, 6));
  CHECK(bernoulli(12) == Rational(-691, 2730));
  CHECK(bernoulli(13) == 0);
  CHECK(bernoulli(30) == Rational(Integer("8615841276005"), Integer(14322)));
}

TEST_CASE("divisor power sums") {
  auto s = divisor_power_sums(1, 12);
  CHECK(s[12] == 28);
  CHECK(s[7] == 8);
  auto s0 = divisor_power_sums(0, 12);
  CHECK(s0[12] == 6);
}

TEST_CASE("Kronecker product matches schoolbook") {
  std::mt19937_64 rng(12345);
  for (int N : {0, 1, 5, 47, 48, 200, 613}) {
    for (int bits : {1, 64, 300}) {
      auto a = random_series(rng, N, bits);
      auto b = random_series(rng, N, bits + 17);
      CHECK(multiply_kronecker(a, b) == multiply_schoolbook(a, b));
    }
  }
  PowerSeries z(100);
  auto a = random_series(rng, 100, 64);
  CHECK(multiply_kronecker(a, z) == z);
}

TEST_CASE("series arithmetic properties") {
  std::mt19937_64 rng(7);
  const int N = 120;
  auto a = random_series(rng, N, 90);
  auto b = random_series(rng, N, 40);
  auto c = random_series(rng, N, 70);
  CHECK(a * b == b * a);
  CHECK((a * b) * c == a * (b * c));
  CHECK(a * (b + c) == a * b + a * c);
  CHECK(a.pow(3) == a * a * a);
  CHECK((a * Integer(6)).divided_exactly(6) == a);
  CHECK_THROWS(PowerSeries({1, 3}).divided_exactly(2));
}

TEST_CASE("cusp space dimensions") {
  CHECK(cusp_dim(12) == 1);
  CHECK(cusp_dim(14) == 0);
  CHECK(cusp_dim(24) == 2);
  CHECK(cusp_dim(26) == 1);
  CHECK(cusp_dim(36) == 3);
  CHECK(cusp_dim(38) == 2);
  CHECK_THROWS_AS(cusp_dim(13), DomainError);
}

TEST_CASE("Miller basis is in echelon form") {
  for (int k = 12; k <= 60; k += 2) {
    int d = cusp_dim(k);
    if (d == 0) {
      CHECK_THROWS_AS(victor_miller_basis(k, 10), DimensionZero);
      continue;
    }
    auto vm = victor_miller_basis(k, 3 * d + 5);
    REQUIRE(vm.dim == d);
    for (int i = 0; i < d; ++i) {
      CHECK(vm.basis[i][0] == 0);
      for (int j = 1; j <= d; ++j) CHECK(vm.basis[i][j] == (i + 1 == j ? 1 : 0));
    }
  }
  CHECK(victor_miller_basis(12, 30).basis[0] == delta_series(30));
  CHECK_THROWS_AS(victor_miller_basis(24, 4), InsufficientOrder);
  CHECK_NOTHROW(victor_miller_basis(24, 5));
}

TEST_CASE("Miller basis spans products of lower-weight cusp forms") {
  // Delta * E_12 lies in S_24; its coordinates are its first d coefficients.
  const int N = 60;
  auto vm = victor_miller_basis(24, N);
  auto e12 = eisenstein_series(12, N);
  PowerSeries f = delta_series(N) * e12.numerator;
  PowerSeries comb = vm.basis[0] * f[1] + vm.basis[1] * f[2];
  CHECK(comb == f);
}

TEST_CASE("Hecke matrices in weight 12 and 24") {
  auto vm12 = victor_miller_basis(12, 40);
  CHECK(hecke_matrix(2, vm12).entries(0, 0) == -24);
  CHECK(hecke_matrix(3, vm12).entries(0, 0) == 252);

  auto vm24 = victor_miller_basis(24, 60);
  auto t2 = hecke_matrix(2, vm24).entries;
  CHECK(t2.trace() == 1080);
  auto cp = charpoly(t2);
  REQUIRE(cp.size() == 3);
  CHECK(cp[2] == 1);
  CHECK(cp[1] == -1080);
  // eigenvalues 540 +- 12 sqrt(144169)
  CHECK(cp[0] == 540 * 540 - 144 * 144169);
  CHECK_THROWS_AS(hecke_matrix(4, vm24), DomainError);
  CHECK_THROWS_AS(hecke_matrix(23, vm24), InsufficientOrder);
}

TEST_CASE("Hecke operators commute") {
  for (int k : {24, 36, 48, 72}) {
    int d = cusp_dim(k);
    auto vm = victor_miller_basis(k, 5 * (d + 1));
    auto t2 = hecke_matrix(2, vm).entries;
    auto t3 = hecke_matrix(3, vm).entries;
    auto t5 = hecke_matrix(5, vm).entries;
    CHECK(t2 * t3 == t3 * t2);
    CHECK(t2 * t5 == t5 * t2);
  }
}

TEST_CASE("charpoly by Faddeev-LeVerrier") {
  IntMatrix m(3);
  int v[3][3] = {{2, -1, 0}, {4, 3, 7}, {-5, 1, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[i][j];
  auto c = charpoly(m);
  // det = 2*(3-7) - (-1)*(4+35) = 31; trace 6; sum of principal 2x2 minors = 10 + 2 + (-4) = 8
  CHECK(c[3] == 1);
  CHECK(c[2] == -6);
  CHECK(c[1] == 8);
  CHECK(c[0] == -31);
}
