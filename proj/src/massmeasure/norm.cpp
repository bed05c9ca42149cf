#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "quelab/errors.hpp"
#include "quelab/massmeasure.hpp"

namespace quelab::massmeasure {

namespace {

using ld = long double;
constexpr ld kPi = std::numbers::pi_v<long double>;

struct GaussRule {
  std::vector<ld> x, w;  // on [0, 1]
};

const GaussRule& gauss_legendre(int m) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < m; ++i) {
    ld z = std::cos(kPi * (i + 0.75L) / (m + 0.5L));
    ld dp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      ld p0 = 1, p1 = z;
      for (int j = 2; j <= m; ++j) {
        ld p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1);
      ld dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-21L) break;
    }
    r.x[i] = (1 - z) / 2;
    r.w[i] = 1 / ((1 - z * z) * dp * dp);
  }
  return cache.emplace(m, std::move(r)).first->second;
}

constexpr int kOrder = 16;

// Evaluates sqrt(S) y^{k/2} f_i(x+iy) for all forms at once; S = (4 pi)^{k-1}/(k-2)!.
class FormEvaluator {
 public:
  FormEvaluator(const std::vector<const Eigenform*>& forms, int nterms)
      : k_(forms[0]->weight), nterms_(nterms) {
    half_log_scale_ = static_cast<ld>(log_scale(k_) / 2);
    ratio_.resize(static_cast<size_t>(nterms) + 1);
    for (int n = 1; n < nterms; ++n) ratio_[n] = std::pow(static_cast<ld>(n + 1) / n, (k_ - 1) / 2.0L);
    lambda_.resize(forms.size());
    for (size_t i = 0; i < forms.size(); ++i) {
      lambda_[i].resize(static_cast<size_t>(nterms) + 1);
      for (int n = 1; n <= nterms; ++n) lambda_[i][n] = forms[i]->lambda[n].convert_to<ld>();
    }
    re_.resize(forms.size());
    im_.resize(forms.size());
  }

  void eval(ld x, ld y) {
    std::fill(re_.begin(), re_.end(), 0.0L);
    std::fill(im_.begin(), im_.end(), 0.0L);
    ld c = std::exp(half_log_scale_ + (k_ / 2.0L) * std::log(y) - 2 * kPi * y);
    ld q = std::exp(-2 * kPi * y);
    ld zr = std::cos(2 * kPi * x), zi = std::sin(2 * kPi * x);
    ld wr = zr, wi = zi;
    ld peak = 0;
    for (int n = 1; n <= nterms_; ++n) {
      for (size_t i = 0; i < lambda_.size(); ++i) {
        ld a = lambda_[i][n] * c;
        re_[i] += a * wr;
        im_[i] += a * wi;
      }
      peak = std::max(peak, c);
      if (n == nterms_) break;
      // Past the peak the terms fall geometrically; 2 sqrt(n) bounds |lambda(n)|.
      if (c < peak * 1e-30L && n > 1) break;
      c *= ratio_[n] * q;
      ld t = wr * zr - wi * zi;
      wi = wr * zi + wi * zr;
      wr = t;
    }
  }

  ld re(size_t i) const { return re_[i]; }
  ld im(size_t i) const { return im_[i]; }

 private:
  int k_;
  int nterms_;
  ld half_log_scale_;
  std::vector<ld> ratio_;
  std::vector<std::vector<ld>> lambda_;
  std::vector<ld> re_, im_;
};

// Integral of y^{-2} Re(F_i conj F_j) over {0 <= x <= 1/2, sqrt(1-x^2) <= y <= Y},
// doubled for the mirror half. Returns the packed upper triangle.
std::vector<ld> quadrature(FormEvaluator& ev, size_t nforms, ld Y, int panels, int order) {
  const GaussRule& g = gauss_legendre(order);
  const size_t npairs = nforms * (nforms + 1) / 2;
  std::vector<ld> total(npairs, 0.0L);
  const ld hx = 0.5L / panels, ht = 1.0L / panels;
  for (int px = 0; px < panels; ++px) {
    std::vector<ld> panel_sum(npairs, 0.0L);
    for (int ix = 0; ix < order; ++ix) {
      ld x = (px + g.x[ix]) * hx;
      ld bottom = std::sqrt(1 - x * x);
      ld height = Y - bottom;
      std::vector<ld> col(npairs, 0.0L);
      for (int pt = 0; pt < panels; ++pt) {
        for (int it = 0; it < order; ++it) {
          ld t = (pt + g.x[it]) * ht;
          ld y = bottom + height * t;
          ev.eval(x, y);
          ld w = g.w[it] / (y * y);
          size_t idx = 0;
          for (size_t i = 0; i < nforms; ++i)
            for (size_t j = i; j < nforms; ++j) col[idx++] += w * (ev.re(i) * ev.re(j) + ev.im(i) * ev.im(j));
        }
      }
      for (size_t idx = 0; idx < npairs; ++idx) panel_sum[idx] += g.w[ix] * height * ht * col[idx];
    }
    for (size_t idx = 0; idx < npairs; ++idx) total[idx] += 2 * hx * panel_sum[idx];
  }
  return total;
}

}  // namespace

Real log_scale(int k) {
  return Real(k - 1) * log(4 * pi()) - specfun::log_factorial(k - 2).logmag();
}

int quadrature_coefficients(int k) {
  // Terms 2 sqrt(n) sqrt(S) (ny)^{(k-1)/2} y^{1/2} e^{-2 pi n y} at the lowest point y = sqrt(3)/2.
  const double y = std::sqrt(3.0) / 2;
  const double hs = static_cast<double>(log_scale(k)) / 2;
  auto logterm = [&](double n) {
    return std::log(2 * std::sqrt(n)) + hs + (k - 1) / 2.0 * std::log(n * y) + 0.5 * std::log(y) - 2 * M_PI * n * y;
  };
  double peak = -1e300;
  for (int n = 1;; ++n) {
    double l = logterm(n);
    peak = std::max(peak, l);
    double r = std::exp(logterm(n + 1) - l);
    if (n > (k - 1) / (4 * M_PI * y) && r < 1 && l + std::log(r / (1 - r)) < peak - 80) return n;
  }
}

GramResult petersson_gram(const std::vector<const Eigenform*>& forms, const Real& Y, double quad_tol) {
  if (forms.empty()) throw DomainError("no forms given");
  const int k = forms[0]->weight;
  for (auto* f : forms)
    if (f->weight != k) throw WeightMismatch("Gram matrix needs forms of one weight");
  if (!(Y >= 1)) throw DomainError("split height Y must be at least 1");
  if (!(quad_tol >= 1e-15) || !(quad_tol < 1)) throw DomainError("quad_tol must lie in [1e-15, 1)");

  const int nq = quadrature_coefficients(k);
  int have = forms[0]->ncoeffs;
  for (auto* f : forms) have = std::min(have, f->ncoeffs);
  if (have < nq) throw InsufficientCoeffs("quadrature needs " + std::to_string(nq) + " coefficients");

  const size_t nf = forms.size();
  GramResult out;
  out.scaled.assign(nf, std::vector<Real>(nf));

  // Strip above Y in closed form.
  const long s = k - 1;
  Real first = specfun::log_reg_inc_gamma_q(s, 4 * pi() * Y).logmag();
  long ntail = specfun::series_truncation_index(k, Y, first - Real(working_bits() + 16) * ln2());
  if (ntail > have) throw InsufficientCoeffs("strip tail needs " + std::to_string(ntail) + " coefficients");
  std::vector<std::vector<Real>> tail(nf, std::vector<Real>(nf, Real(0)));
  for (long n = 1; n <= ntail; ++n) {
    Real q = specfun::reg_inc_gamma_q(s, 4 * pi() * Y * n);
    for (size_t i = 0; i < nf; ++i)
      for (size_t j = i; j < nf; ++j) tail[i][j] += (*forms[i])(n) * (*forms[j])(n) * q;
  }

  FormEvaluator ev(forms, nq);
  const ld y = Y.convert_to<ld>();
  ld prev_err = -1;
  for (int panels = 2;; panels *= 2) {
    auto lo = quadrature(ev, nf, y, panels, kOrder);
    auto hi = quadrature(ev, nf, y, panels, 2 * kOrder);
    ld scale = 1e300L;
    size_t idx = 0;
    for (size_t i = 0; i < nf; ++i)
      for (size_t j = i; j < nf; ++j, ++idx)
        if (i == j) scale = std::min(scale, hi[idx] + tail[i][i].convert_to<ld>());
    ld err = 0;
    for (size_t m = 0; m < hi.size(); ++m) err = std::max(err, std::fabs(hi[m] - lo[m]) / scale);
    bool floor_reached = err < 1e-17L;
    if (err <= quad_tol || floor_reached) {
      idx = 0;
      for (size_t i = 0; i < nf; ++i)
        for (size_t j = i; j < nf; ++j, ++idx) {
          Real v = Real(hi[idx]) + tail[i][j];
          out.scaled[i][j] = v;
          out.scaled[j][i] = v;
        }
      out.quad_error = static_cast<double>(err);
      out.panels = panels;
      return out;
    }
    if (prev_err >= 0 && err > prev_err / 2) {
      throw QuadratureStall("panel refinement stopped halving the error estimate at " + std::to_string(panels) +
                            " panels");
    }
    if (panels >= 512) throw QuadratureStall("quadrature did not reach tolerance with 512 panels");
    prev_err = err;
  }
}

NormResult petersson_norm_sq(const Eigenform& form, const Real& Y, double quad_tol) {
  GramResult g = petersson_gram({&form}, Y, quad_tol);
  NormResult r;
  r.scaled = g.scaled[0][0];
  if (!(r.scaled > 0)) throw NumericError("non-positive Petersson norm");
  r.norm_sq = LogReal::from_log(log(r.scaled) - log_scale(form.weight));
  r.quad_error = g.quad_error;
  r.panels = g.panels;
  r.quad_terms = quadrature_coefficients(form.weight);
  // Recompute the split for reporting.
  const long s = form.weight - 1;
  Real first = specfun::log_reg_inc_gamma_q(s, 4 * pi() * Y).logmag();
  r.tail_terms = specfun::series_truncation_index(form.weight, Y, first - Real(working_bits() + 16) * ln2());
  Real tail = 0;
  for (long n = 1; n <= r.tail_terms; ++n) tail += form(n) * form(n) * specfun::reg_inc_gamma_q(s, 4 * pi() * Y * n);
  r.tail_part = tail;
  r.quad_part = r.scaled - tail;
  return r;
}

Sym2Value sym2_l_value(int k, const LogReal& norm_sq) {
  if (norm_sq.sign() <= 0) throw DomainError("norm must be positive");
  Real l = norm_sq.logmag() + log(pi() / 2) + Real(k) * log(4 * pi()) - specfun::log_factorial(k - 1).logmag();
  Sym2Value v;
  v.L = exp(l);
  v.R = v.L / euler_zeta2();
  return v;
}

MassProfile make_profile(const Eigenform& form, const NormResult& norm) {
  MassProfile p;
  p.weight = form.weight;
  p.index = form.index;
  p.norm_sq = norm.norm_sq;
  p.scaled_norm = norm.scaled;
  Sym2Value s = sym2_l_value(form.weight, norm.norm_sq);
  p.sym2_l = s.L;
  p.sym2_r = s.R;
  p.quad_error = norm.quad_error;
  return p;
}

}  // namespace quelab::massmeasure
