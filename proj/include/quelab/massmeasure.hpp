#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "quelab/eigenforms.hpp"
#include "quelab/specfun.hpp"

namespace quelab::massmeasure {

using eigenforms::EigenBasis;
using eigenforms::Eigenform;
using specfun::LogReal;

/// (a, b) x (t1, t2); t2 empty means the rectangle runs up to the cusp.
struct Rectangle {
  Real a, b, t1;
  std::optional<Real> t2;
  void validate() const;
};

/// {a < x < b, y > T}.
struct SiegelDomain {
  Real a, b, T;
  Rectangle rect() const { return {a, b, T, std::nullopt}; }
};

/// ln of (4 pi)^{k-1} / (k-2)!, the factor turning ||f||^2 into the scaled norm
/// N_s = sum-side normalization used by every mass kernel.
Real log_scale(int k);

struct NormResult {
  LogReal norm_sq;      // ||f||^2 = integral over the fundamental domain of y^k |f|^2 dx dy / y^2
  Real scaled;          // ||f||^2 (4 pi)^{k-1} / (k-2)!
  Real quad_part;       // scaled quadrature part below y = Y
  Real tail_part;       // scaled strip part above y = Y
  double quad_error = 0;  // estimated relative error of the quadrature part
  int panels = 0;
  int quad_terms = 0;
  long tail_terms = 0;
};

struct GramResult {
  std::vector<std::vector<Real>> scaled;  // (4 pi)^{k-1}/(k-2)! <f_i, f_j>
  double quad_error = 0;
  int panels = 0;
};

/// Scaled Petersson inner products of same-weight forms: Gauss-Legendre panels
/// over the part of the fundamental domain below y = Y plus the closed-form strip above.
GramResult petersson_gram(const std::vector<const Eigenform*>& forms, const Real& Y, double quad_tol);
NormResult petersson_norm_sq(const Eigenform& form, const Real& Y, double quad_tol);

struct Sym2Value {
  Real L;  // ||f||^2 (pi/2) (4 pi)^k / (k-1)!
  Real R;  // L / zeta(2)
};
Sym2Value sym2_l_value(int k, const LogReal& norm_sq);

/// Everything the mass kernels need about one form's normalization.
struct MassProfile {
  int weight = 0;
  int index = 0;
  LogReal norm_sq;
  Real scaled_norm;
  Real sym2_l;
  Real sym2_r;
  double quad_error = 0;
};
MassProfile make_profile(const Eigenform& form, const NormResult& norm);

struct VerticalResult {
  Real value;          // reduced form: 2 pi^2 / ((k-1) L) sum lambda^2 Q(k-1, 4 pi n T)
  Real raw_value;      // (1/||f||^2)(4 pi)^{1-k} sum lambda^2 Gamma(k-1, 4 pi n T)
  LogReal log_value;   // value without underflow
  long truncation = 0;  // N*
  LogReal tail_bound;   // certified bound on the dropped scaled terms, divided by N_s
};

/// I_k(T).
VerticalResult vertical_mass(const Eigenform& form, const Real& T, const MassProfile& profile);

struct RectResult {
  Real value;
  LogReal log_value;
  long truncation = 0;
  long band = 0;            // L_max
  LogReal remainder_bound;  // certified bound on everything dropped, relative to mu's normalization
  double cancellation_bits = 0;
};

/// mu_k(R).
RectResult rect_mass(const Eigenform& form, const Rectangle& R, const MassProfile& profile);

struct SiegelResult {
  RectResult mass;
  Real log_bound;  // -2 pi T - ln(2 pi T)
  bool in_hypothesis = false;  // T >= 4 k ln k
};
SiegelResult siegel_mass(const Eigenform& form, const SiegelDomain& S, const MassProfile& profile);

struct CrossResult {
  std::complex<double> approx;  // normalized value, for display
  Real re, im;                  // <psi f1, f2> / (||f1|| ||f2||)
  LogReal value_re, value_im;   // <psi f1, f2> itself
  long truncation = 0;
  long band = 0;
};
CrossResult cross_mass(const Eigenform& f1, const MassProfile& p1, const Eigenform& f2, const MassProfile& p2,
                       const Rectangle& R);

/// mu of F = sum alpha_i f_i over R, with ||F||^2 = sum |alpha_i|^2 ||f_i||^2.
Real admissible_mass(const std::vector<std::complex<double>>& alpha, const EigenBasis& basis,
                     const std::vector<MassProfile>& profiles, const Rectangle& R);

struct MainErrorSplit {
  Real main, error, total;
  long cut = 0;              // floor((k + k^{1/2+delta}) / (4 pi T))
  LogReal error_certificate;  // bound on the error part from the tail lemma
};
MainErrorSplit main_error_split(const Eigenform& form, const Real& T, const Real& delta, const MassProfile& profile);

/// Coefficients needed by the quadrature (at the bottom of the domain).
int quadrature_coefficients(int k);
/// Coefficients needed for vertical sums at height T to working precision.
long vertical_coefficients(int k, const Real& T);

}  // namespace quelab::massmeasure
