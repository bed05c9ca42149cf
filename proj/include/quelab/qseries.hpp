#pragma once

// Exact q-expansions and the cusp-form space S_k(SL(2,Z)) with its Hecke action.

#include <cstddef>
#include <vector>

#include "quelab/real.hpp"

namespace quelab::qseries {

/// Integer q-expansion c_0 + c_1 q + ... + c_N q^N, truncated at order N.
/// Arithmetic is exact and products keep the common truncation order.
class PowerSeries {
 public:
  PowerSeries() = default;
  /// Zero series of order N.
  explicit PowerSeries(int order);
  explicit PowerSeries(std::vector<Integer> coeffs);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Integer& operator[](int n) const { return coeffs_[static_cast<size_t>(n)]; }
  Integer& operator[](int n) { return coeffs_[static_cast<size_t>(n)]; }
  const std::vector<Integer>& coeffs() const { return coeffs_; }

  /// Same series truncated (or zero-padded) to order N.
  PowerSeries truncated(int order) const;

  PowerSeries& operator+=(const PowerSeries& rhs);
  PowerSeries& operator-=(const PowerSeries& rhs);
  PowerSeries& operator*=(const Integer& scalar);

  friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
  friend PowerSeries operator-(PowerSeries a, const PowerSeries& b) { return a -= b; }
  friend PowerSeries operator*(PowerSeries a, const Integer& s) { return a *= s; }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
  friend bool operator==(const PowerSeries& a, const PowerSeries& b) = default;

  PowerSeries pow(unsigned e) const;
  /// Exact division of every coefficient; throws if some coefficient is not divisible.
  PowerSeries divided_exactly(const Integer& d) const;

 private:
  std::vector<Integer> coeffs_;
};

/// Schoolbook truncated product; coefficient ranges are evaluated in parallel.
PowerSeries multiply_schoolbook(const PowerSeries& a, const PowerSeries& b);
/// Truncated product through a single large-integer multiplication
/// (Kronecker substitution); exact, used for long series.
PowerSeries multiply_kronecker(const PowerSeries& a, const PowerSeries& b);

/// A rational q-expansion stored as an integer series over one common denominator.
struct ScaledSeries {
  PowerSeries numerator;
  Integer denominator{1};
};

/// Exact Bernoulli number B_n (B_1 = -1/2 convention).
Rational bernoulli(int n);

/// sigma_e(n) for n = 0..N (entry 0 is 0).
std::vector<Integer> divisor_power_sums(int e, int N);

/// Normalized Eisenstein series E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n.
ScaledSeries eisenstein_series(int k, int N);

/// Delta = q prod (1 - q^n)^24 to order N, via the Jacobi triple product for eta^3.
PowerSeries delta_series(int N);
/// (E_4^3 - E_6^2) / 1728 to order N.
PowerSeries delta_from_eisenstein(int N);

/// dim S_k(SL(2,Z)) for even k.
int cusp_dim(int k);

/// Dense square matrix of exact integers, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}
  int size() const { return n_; }
  Integer& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  const Integer& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
  Integer trace() const;
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

 private:
  int n_ = 0;
  std::vector<Integer> a_;
};

/// Miller basis g_1..g_d of S_k: g_i = q^i + O(q^{d+1}), integral coefficients.
struct VictorMillerBasis {
  int weight = 0;
  int dim = 0;
  int order = 0;
  std::vector<PowerSeries> basis;
};

VictorMillerBasis victor_miller_basis(int k, int N);

/// Matrix of T_p on the Miller basis: T_p g_i = sum_j M(j, i) g_j.
struct HeckeMatrix {
  int prime = 0;
  int weight = 0;
  IntMatrix entries;
};

bool is_prime(long n);
HeckeMatrix hecke_matrix(int p, const VictorMillerBasis& basis);

/// Characteristic polynomial det(xI - M), coefficients low to high degree (monic).
std::vector<Integer> charpoly(const IntMatrix& m);

}  // namespace quelab::qseries
