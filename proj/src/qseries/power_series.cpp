#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "quelab/qseries.hpp"

namespace quelab::qseries {

namespace {

// Below this order the schoolbook product beats packing into one big integer.
constexpr int kKroneckerThreshold = 48;

size_t max_bits(const std::vector<Integer>& v) {
  size_t bits = 0;
  for (const auto& c : v) {
    if (c != 0) bits = std::max(bits, mpz_sizeinbase(c.get_mpz_t(), 2));
  }
  return bits;
}

// Packs sum c_i 2^(64*w*i) as a signed integer, w limbs per slot.
Integer pack(const std::vector<Integer>& c, int count, size_t w) {
  std::vector<mp_limb_t> pos(static_cast<size_t>(count) * w, 0);
  std::vector<mp_limb_t> neg(static_cast<size_t>(count) * w, 0);
  bool any_neg = false;
  for (int i = 0; i < count; ++i) {
    const Integer& v = c[static_cast<size_t>(i)];
    int sgn = mpz_sgn(v.get_mpz_t());
    if (sgn == 0) continue;
    mp_limb_t* dst = (sgn > 0 ? pos.data() : neg.data()) + static_cast<size_t>(i) * w;
    size_t written = 0;
    mpz_export(dst, &written, -1, sizeof(mp_limb_t), 0, 0, v.get_mpz_t());
    if (sgn < 0) any_neg = true;
  }
  Integer p, n;
  mpz_import(p.get_mpz_t(), pos.size(), -1, sizeof(mp_limb_t), 0, 0, pos.data());
  if (any_neg) {
    mpz_import(n.get_mpz_t(), neg.size(), -1, sizeof(mp_limb_t), 0, 0, neg.data());
    p -= n;
  }
  return p;
}

// Inverse of pack for the lowest `count` slots; slot values must satisfy |c| < 2^(64w-1).
std::vector<Integer> unpack(const Integer& packed, int count, size_t w) {
  std::vector<Integer> out(static_cast<size_t>(count));
  int sgn = mpz_sgn(packed.get_mpz_t());
  if (sgn == 0) return out;
  Integer mag = abs(packed);
  const mp_limb_t* limbs = mpz_limbs_read(mag.get_mpz_t());
  size_t nlimbs = mpz_size(mag.get_mpz_t());

  Integer half, full;
  mpz_setbit(half.get_mpz_t(), 64 * w - 1);
  mpz_setbit(full.get_mpz_t(), 64 * w);
  int carry = 0;
  std::vector<mp_limb_t> slot(w);
  for (int i = 0; i < count; ++i) {
    size_t start = static_cast<size_t>(i) * w;
    for (size_t j = 0; j < w; ++j) slot[j] = start + j < nlimbs ? limbs[start + j] : 0;
    Integer t;
    mpz_import(t.get_mpz_t(), w, -1, sizeof(mp_limb_t), 0, 0, slot.data());
    t += carry;
    if (t >= half) {
      t -= full;
      carry = 1;
    } else {
      carry = 0;
    }
    out[static_cast<size_t>(i)] = sgn > 0 ? t : Integer(-t);
  }
  return out;
}

}  // namespace

PowerSeries::PowerSeries(int order) : coeffs_(static_cast<size_t>(std::max(order, 0)) + 1) {
  if (order < 0) throw std::invalid_argument("series order must be non-negative");
}

PowerSeries::PowerSeries(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("series needs at least the constant term");
}

PowerSeries PowerSeries::truncated(int order) const {
  PowerSeries r(order);
  int n = std::min(order, this->order());
  for (int i = 0; i <= n; ++i) r[i] = (*this)[i];
  return r;
}

PowerSeries& PowerSeries::operator+=(const PowerSeries& rhs) {
  if (rhs.order() != order()) throw std::invalid_argument("series orders differ");
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

PowerSeries& PowerSeries::operator-=(const PowerSeries& rhs) {
  if (rhs.order() != order()) throw std::invalid_argument("series orders differ");
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

PowerSeries& PowerSeries::operator*=(const Integer& scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

PowerSeries multiply_schoolbook(const PowerSeries& a, const PowerSeries& b) {
  if (a.order() != b.order()) throw std::invalid_argument("series orders differ");
  const int N = a.order();
  int lead_a = 0, lead_b = 0;
  while (lead_a <= N && a[lead_a] == 0) ++lead_a;
  while (lead_b <= N && b[lead_b] == 0) ++lead_b;
  PowerSeries c(N);
#pragma omp parallel for schedule(dynamic, 16)
  for (int n = 0; n <= N; ++n) {
    mpz_ptr acc = c[n].get_mpz_t();
    for (int i = lead_a; i <= n - lead_b; ++i) {
      mpz_addmul(acc, a[i].get_mpz_t(), b[n - i].get_mpz_t());
    }
  }
  return c;
}

PowerSeries multiply_kronecker(const PowerSeries& a, const PowerSeries& b) {
  if (a.order() != b.order()) throw std::invalid_argument("series orders differ");
  const int count = a.order() + 1;
  size_t bits = max_bits(a.coeffs()) + max_bits(b.coeffs()) +
                mpz_sizeinbase(Integer(count).get_mpz_t(), 2) + 2;
  size_t w = (bits + 63) / 64;
  Integer pa = pack(a.coeffs(), count, w);
  Integer pb = pack(b.coeffs(), count, w);
  Integer pc = pa * pb;
  return PowerSeries(unpack(pc, count, w));
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  if (a.order() < kKroneckerThreshold) return multiply_schoolbook(a, b);
  return multiply_kronecker(a, b);
}

PowerSeries PowerSeries::pow(unsigned e) const {
  PowerSeries result(order());
  result[0] = 1;
  PowerSeries base = *this;
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

PowerSeries PowerSeries::divided_exactly(const Integer& d) const {
  PowerSeries r(order());
  for (int i = 0; i <= order(); ++i) {
    if (!mpz_divisible_p((*this)[i].get_mpz_t(), d.get_mpz_t())) {
      throw std::domain_error("series is not divisible by the given integer");
    }
    mpz_divexact(r[i].get_mpz_t(), (*this)[i].get_mpz_t(), d.get_mpz_t());
  }
  return r;
}

}  // namespace quelab::qseries
