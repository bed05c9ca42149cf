#pragma once

#include <vector>

#include "quelab/qseries.hpp"
#include "quelab/real.hpp"

namespace quelab::eigenforms {

/// A normalized Hecke eigenform of level one, stored through
/// lambda(n) = a(n) n^{-(k-1)/2}, n = 1..ncoeffs, with a(1) = 1.
struct Eigenform {
  int weight = 0;
  int index = 0;  // 1-based, ascending T_2 eigenvalue
  int ncoeffs = 0;
  int precision_bits = 0;
  std::vector<Real> lambda;  // lambda[0] is unused and zero
  Real t2_eigenvalue;

  const Real& operator()(long n) const { return lambda[static_cast<size_t>(n)]; }
};

struct EigenBasis {
  int weight = 0;
  std::vector<Eigenform> forms;
  /// Exact characteristic polynomial of T_2 on S_k, low to high degree.
  std::vector<Integer> t2_charpoly;
  /// Working precision actually used for the linear algebra.
  int working_bits = 0;
};

/// Diagonalizes T_2 on S_k and returns the d eigenforms to ncoeffs coefficients.
EigenBasis eigen_decompose(int k, int ncoeffs, int precision_bits);

/// Real roots of a squarefree integer polynomial (low-to-high coefficients),
/// ascending, certified by exact sign changes to `bits` relative bits.
/// Throws DegenerateSpectrum on repeated roots, ComplexRoot if some roots are not real.
std::vector<Real> real_roots(const std::vector<Integer>& poly, int bits);

/// Builds an eigenform from coordinates in the Miller basis; the vector is
/// rescaled so a(1) = 1, so any nonzero multiple gives the same form.
Eigenform form_from_coordinates(const qseries::VictorMillerBasis& basis, const std::vector<Real>& coords,
                                int ncoeffs, int precision_bits);

/// lambda(n) rebuilt from lambda at primes through the Hecke recursion and multiplicativity.
Real lambda_extend_by_hecke(const Eigenform& form, long n);

long divisor_count(long n);

struct DeligneReport {
  Real max_ratio;      // max |lambda(n)| / d(n)
  long argmax = 1;
  Real max_slack;      // max |lambda(n)| n^{-epsilon}
  bool pass = false;   // max_ratio <= 1 + 2^{-precision_bits/2}
};

DeligneReport deligne_check(const Eigenform& form, long N, double epsilon = 0.1);

}  // namespace quelab::eigenforms
