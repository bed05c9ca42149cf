#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "quelab/errors.hpp"
#include "quelab/massmeasure.hpp"

using namespace quelab;
using namespace quelab::massmeasure;
using boost::multiprecision::abs;

namespace {

struct Fixture {
  eigenforms::EigenBasis basis;
  std::vector<MassProfile> profiles;
};

// One basis and profile set per weight, at 256 bits.
const Fixture& fixture(int k) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  WorkingPrecision wp(256);
  Fixture f;
  f.basis = eigenforms::eigen_decompose(k, std::max(400, quadrature_coefficients(k) + 8), 256);
  for (const auto& form : f.basis.forms) f.profiles.push_back(make_profile(form, petersson_norm_sq(form, Real(2), 1e-12)));
  return cache.emplace(k, std::move(f)).first->second;
}

Integer fact(int m) {
  Integer r = 1;
  for (int j = 2; j <= m; ++j) r *= j;
  return r;
}

Rectangle rect(double a, double b, double t1, std::optional<double> t2 = std::nullopt) {
  Rectangle r{Real(a), Real(b), Real(t1), std::nullopt};
  if (t2) r.t2 = Real(*t2);
  return r;
}

}  // namespace

TEST_CASE("norm of Delta against an independent product-expansion quadrature") {
  const auto& fx = fixture(12);
  WorkingPrecision wp(256);
  // tests/oracles/norm_delta.py
  Real oracle("1.035362056804320922347817e-6");
  Real got = fx.profiles[0].norm_sq.to_real();
  CHECK(abs(got / oracle - 1) < Real(1e-16));
}

TEST_CASE("norm does not depend on the split height") {
  WorkingPrecision wp(256);
  for (int k : {12, 24}) {
    const auto& fx = fixture(k);
    for (const auto& form : fx.basis.forms) {
      Real ref = petersson_norm_sq(form, Real(1.5), 1e-10).scaled;
      for (double Y : {2.0, 3.0}) {
        NormResult r = petersson_norm_sq(form, Real(Y), 1e-10);
        CHECK(abs(r.scaled / ref - 1) < Real(1e-10));
        CHECK(r.quad_part + r.tail_part == r.scaled);
      }
    }
  }
}

TEST_CASE("norm edge cases") {
  WorkingPrecision wp(256);
  const auto& f = fixture(24).basis.forms[1];
  // Close to the arc the quadrature region shrinks and the strip carries almost everything.
  NormResult low = petersson_norm_sq(f, Real(1.0001), 1e-10);
  NormResult mid = petersson_norm_sq(f, Real(2), 1e-10);
  CHECK(low.tail_part / low.scaled > mid.tail_part / mid.scaled);
  CHECK(low.norm_sq.sign() == 1);
  CHECK(low.norm_sq.to_real() > 0);
  CHECK_THROWS_AS(petersson_norm_sq(f, Real(0.9), 1e-10), DomainError);
  CHECK_THROWS_AS(petersson_norm_sq(f, Real(2), 1e-20), DomainError);
  auto shortf = eigenforms::eigen_decompose(24, 8, 128).forms[0];
  CHECK_THROWS_AS(petersson_norm_sq(shortf, Real(2), 1e-10), InsufficientCoeffs);
}

TEST_CASE("symmetric-square value is the inverted norm identity") {
  WorkingPrecision wp(256);
  for (int k : {12, 24, 36}) {
    for (const auto& p : fixture(k).profiles) {
      Real expect = p.norm_sq.to_real() * pi() / 2 * pow(4 * pi(), k) / quelab::to_real(fact(k - 1));
      CHECK(abs(p.sym2_l / expect - 1) < pow2(-240));
      CHECK(abs(p.sym2_r * pi() * pi() / 6 - p.sym2_l) < pow2(-240) * p.sym2_l);
      CHECK(p.sym2_l > 0);
    }
  }
}

TEST_CASE("symmetric-square value at 128 and 256 bits") {
  auto at = [](int bits) {
    WorkingPrecision wp(bits);
    auto eb = eigenforms::eigen_decompose(12, 200, bits);
    return sym2_l_value(12, petersson_norm_sq(eb.forms[0], Real(2), 1e-12).norm_sq).L;
  };
  Real lo = at(128), hi = at(256);
  WorkingPrecision wp(256);
  CHECK(abs(lo - hi) < pow2(-100));
}

TEST_CASE("vertical mass: reduced and raw forms agree, decay in T") {
  WorkingPrecision wp(256);
  for (int k : {12, 24, 60}) {
    const auto& fx = fixture(k);
    for (size_t i = 0; i < fx.basis.forms.size(); ++i) {
      const auto& f = fx.basis.forms[i];
      Real prev = 1e9;
      for (double T : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        VerticalResult v = vertical_mass(f, Real(T), fx.profiles[i]);
        CHECK(v.value > 0);
        CHECK(v.value < prev);
        prev = v.value;
        Real allowed = v.tail_bound.to_real_or_zero() + pow2(-100);
        CHECK(abs(v.value - v.raw_value) <= allowed);
        // The dropped tail is certified far below the value.
        CHECK(v.tail_bound.logmag() < v.log_value.logmag() - 200 * ln2());
      }
    }
  }
}

TEST_CASE("vertical mass of Delta at large T sits under its first term") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(12);
  const auto& f = fx.basis.forms[0];
  for (double T : {5.0, 20.0, 50.0}) {
    VerticalResult v = vertical_mass(f, Real(T), fx.profiles[0]);
    LogReal first = specfun::log_reg_inc_gamma_q(11, 4 * pi() * T) *
                    LogReal::from_real(Real(2 * pi() * pi() / (11 * fx.profiles[0].sym2_l)));
    Real ratio = exp(v.log_value.logmag() - first.logmag());
    CHECK(ratio >= 1);
    CHECK(ratio < 1 + Real(1e-10));
  }
}

TEST_CASE("full-period rectangle equals the vertical mass") {
  WorkingPrecision wp(256);
  for (int k : {12, 24, 40}) {
    const auto& fx = fixture(k);
    for (size_t i = 0; i < fx.basis.forms.size(); ++i) {
      for (double T : {0.8, 1.0, 3.0}) {
        RectResult r = rect_mass(fx.basis.forms[i], rect(-0.5, 0.5, T), fx.profiles[i]);
        VerticalResult v = vertical_mass(fx.basis.forms[i], Real(T), fx.profiles[i]);
        CHECK(abs(r.value - v.value) < pow2(-100));
      }
    }
  }
}

TEST_CASE("rectangle mass of Delta against a direct two-dimensional quadrature") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(12);
  // tests/oracles/rect_mass.py 12 0 0.25 1, 25 digits
  Real oracle("0.20160664492394863573");
  RectResult r = rect_mass(fx.basis.forms[0], rect(0, 0.25, 1), fx.profiles[0]);
  CHECK(abs(r.value - oracle) < Real(1e-18));
}

TEST_CASE("rectangle mass is additive, monotone and positive") {
  WorkingPrecision wp(256);
  for (int k : {12, 24, 48}) {
    const auto& fx = fixture(k);
    for (size_t i = 0; i < fx.basis.forms.size(); ++i) {
      const auto& f = fx.basis.forms[i];
      const auto& p = fx.profiles[i];
      auto mu = [&](double a, double b, double t1, std::optional<double> t2 = std::nullopt) {
        RectResult r = rect_mass(f, rect(a, b, t1, t2), p);
        CHECK(r.value >= -pow2(-90));
        CHECK(r.remainder_bound.logmag() < log(pow2(-200)));
        return r.value;
      };
      // x splits
      CHECK(abs(mu(0, 0.25, 1) + mu(0.25, 0.5, 1) - mu(0, 0.5, 1)) < pow2(-90));
      CHECK(abs(mu(-0.3, 0.1, 0.9, 2.0) + mu(0.1, 0.35, 0.9, 2.0) - mu(-0.3, 0.35, 0.9, 2.0)) < pow2(-90));
      // y splits
      CHECK(abs(mu(0, 0.25, 1, 2) + mu(0, 0.25, 2) - mu(0, 0.25, 1)) < pow2(-90));
      // nesting
      Real inner = mu(0.1, 0.2, 1.2, 1.5), outer = mu(0.05, 0.3, 1.0, 2.0);
      CHECK(inner <= outer + pow2(-90));
      CHECK(mu(0, 0.25, 1) <= mu(-0.5, 0.5, 1) + pow2(-90));
    }
  }
}

TEST_CASE("rectangle validation") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(12);
  const auto& f = fx.basis.forms[0];
  const auto& p = fx.profiles[0];
  CHECK_THROWS_AS(rect_mass(f, rect(0.2, 0.1, 1), p), DomainError);
  CHECK_THROWS_AS(rect_mass(f, rect(0, 0.5, 0), p), DomainError);
  CHECK_THROWS_AS(rect_mass(f, rect(0, 0.5, 2, 1), p), DomainError);
  CHECK_THROWS_AS(rect_mass(f, rect(-0.6, 0.6, 1), p), DomainError);
  auto shortf = eigenforms::eigen_decompose(12, 3, 128).forms[0];
  CHECK_THROWS_AS(rect_mass(shortf, rect(0, 0.5, 0.1), p), InsufficientCoeffs);
}

TEST_CASE("Siegel domain mass of Delta at T = 120") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(12);
  SiegelResult s = siegel_mass(fx.basis.forms[0], {Real(-0.5), Real(0.5), Real(120)}, fx.profiles[0]);
  CHECK(s.in_hypothesis);
  CHECK(s.mass.log_value.sign() == 1);
  CHECK(s.mass.log_value.logmag() <= s.log_bound);
  Real x = 2 * pi() * 120;
  CHECK(abs(s.log_bound + x + log(x)) < pow2(-240));
  // Far above the plain exponent range: the value underflows but the log is still there.
  SiegelResult far = siegel_mass(fx.basis.forms[0], {Real(-0.5), Real(0.5), Real(1e9)}, fx.profiles[0]);
  CHECK(far.mass.value == 0);
  CHECK(far.mass.log_value.sign() == 1);
  CHECK(far.mass.log_value.logmag() <= far.log_bound);
  SiegelResult low = siegel_mass(fx.basis.forms[0], {Real(-0.5), Real(0.5), Real(1)}, fx.profiles[0]);
  CHECK_FALSE(low.in_hypothesis);
  CHECK_THROWS_AS(siegel_mass(fx.basis.forms[0], {Real(-0.7), Real(0.5), Real(1)}, fx.profiles[0]), DomainError);
}

TEST_CASE("cross mass: diagonal case, Cauchy-Schwarz, weight guard") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(24);
  const auto& f1 = fx.basis.forms[0];
  const auto& f2 = fx.basis.forms[1];
  for (auto R : {rect(0, 0.25, 1, 2.0), rect(-0.5, 0.5, 1)}) {
    CrossResult self = cross_mass(f1, fx.profiles[0], f1, fx.profiles[0], R);
    RectResult r = rect_mass(f1, R, fx.profiles[0]);
    CHECK(self.re == r.value);
    CHECK(abs(self.im) < pow2(-200));
  }
  Rectangle R = rect(0, 0.25, 1, 2.0);
  CrossResult c = cross_mass(f1, fx.profiles[0], f2, fx.profiles[1], R);
  Real m1 = rect_mass(f1, R, fx.profiles[0]).value, m2 = rect_mass(f2, R, fx.profiles[1]).value;
  Real mod = sqrt(c.re * c.re + c.im * c.im);
  CHECK(mod <= sqrt(m1 * m2));
  CHECK(mod < std::min(m1, m2));
  // Swapping the forms conjugates.
  CrossResult d = cross_mass(f2, fx.profiles[1], f1, fx.profiles[0], R);
  CHECK(abs(d.re - c.re) < pow2(-200));
  CHECK(abs(d.im + c.im) < pow2(-200));
  const auto& g = fixture(12);
  CHECK_THROWS_AS(cross_mass(f1, fx.profiles[0], g.basis.forms[0], g.profiles[0], R), WeightMismatch);
}

TEST_CASE("weight 24 eigenforms are Petersson orthogonal") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(24);
  GramResult g = petersson_gram({&fx.basis.forms[0], &fx.basis.forms[1]}, Real(2), 1e-12);
  Real cosine = g.scaled[0][1] / sqrt(g.scaled[0][0] * g.scaled[1][1]);
  CHECK(abs(cosine) < Real(1e-14));
  CHECK(abs(g.scaled[0][0] / fx.profiles[0].scaled_norm - 1) < Real(1e-12));
}

TEST_CASE("admissible combinations") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(24);
  Rectangle R = rect(0, 0.25, 1);
  Real one_hot = admissible_mass({{1, 0}, {0, 0}}, fx.basis, fx.profiles, R);
  CHECK(abs(one_hot - rect_mass(fx.basis.forms[0], R, fx.profiles[0]).value) < pow2(-200));
  Real other = admissible_mass({{0, 0}, {0, -2.5}}, fx.basis, fx.profiles, R);
  CHECK(abs(other - rect_mass(fx.basis.forms[1], R, fx.profiles[1]).value) < pow2(-200));

  std::vector<std::complex<double>> alpha{{0.6, -0.3}, {1.1, 0.4}};
  Real base = admissible_mass(alpha, fx.basis, fx.profiles, R);
  for (double theta : {0.7, 2.0, -1.3}) {
    auto rot = alpha;
    for (auto& a : rot) a *= std::polar(1.0, theta);
    Real v = admissible_mass(rot, fx.basis, fx.profiles, R);
    CHECK(abs(v - base) < Real(1e-14) * base);
  }
  CHECK_THROWS_AS(admissible_mass({{0, 0}, {0, 0}}, fx.basis, fx.profiles, R), AllZeroCoeffs);
  CHECK_THROWS_AS(admissible_mass({{1, 0}}, fx.basis, fx.profiles, R), DomainError);
}

TEST_CASE("admissible mass on the full-width strip against the expanded sum") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(24);
  const auto& f1 = fx.basis.forms[0];
  const auto& f2 = fx.basis.forms[1];
  Rectangle R = rect(-0.5, 0.5, 1);
  Real got = admissible_mass({{1, 0}, {1, 0}}, fx.basis, fx.profiles, R);
  // Over a full period only n = m survives: the cross term is sum lambda1 lambda2 Q(k-1, 4 pi n).
  Real n1 = fx.profiles[0].scaled_norm, n2 = fx.profiles[1].scaled_norm;
  Real i1 = vertical_mass(f1, Real(1), fx.profiles[0]).value;
  Real i2 = vertical_mass(f2, Real(1), fx.profiles[1]).value;
  Real cross = 0;
  for (long n = 1; n <= 200; ++n) cross += f1(n) * f2(n) * specfun::reg_inc_gamma_q(23, 4 * pi() * n);
  Real expect = (n1 * i1 + n2 * i2 + 2 * cross) / (n1 + n2);
  CHECK(abs(got - expect) < pow2(-180));
}

TEST_CASE("main and error parts rebuild I") {
  WorkingPrecision wp(256);
  for (int k : {12, 24, 60, 100}) {
    const auto& fx = fixture(k);
    for (size_t i = 0; i < fx.basis.forms.size(); ++i) {
      for (double T : {1.0, 2.0}) {
        MainErrorSplit s = main_error_split(fx.basis.forms[i], Real(T), Real(0.1), fx.profiles[i]);
        VerticalResult v = vertical_mass(fx.basis.forms[i], Real(T), fx.profiles[i]);
        CHECK(abs(s.main + s.error - v.value) < pow2(-100));
        CHECK(abs(s.total - v.value) < pow2(-200));
        CHECK(s.error >= 0);
        CHECK(s.error <= s.error_certificate.to_real_or_zero());
        Real kk(k);
        CHECK(s.cut == static_cast<long>(floor((kk + pow(kk, Real(0.6))) / (4 * pi() * T)).convert_to<double>()));
      }
    }
  }
}

TEST_CASE("error part of Delta at T = 10 under its certificate") {
  WorkingPrecision wp(256);
  const auto& fx = fixture(12);
  MainErrorSplit s = main_error_split(fx.basis.forms[0], Real(10), Real(0.1), fx.profiles[0]);
  CHECK(s.cut == 0);
  CHECK(s.main == 0);
  CHECK(s.error > 0);
  CHECK(s.error <= s.error_certificate.to_real_or_zero());
  CHECK_THROWS_AS(main_error_split(fx.basis.forms[0], Real(1), Real(0.5), fx.profiles[0]), DomainError);
}
